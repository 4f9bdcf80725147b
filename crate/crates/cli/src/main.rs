//! Command-line surface for the shuffle-lab library. Every subcommand
//! prints either a human-readable summary or, with --json, a report whose
//! bytes depend only on the inputs (timing is shown in human mode only,
//! so identical invocations stay byte-identical).
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input.

use clap::{Parser, Subcommand};
use shuffle_lab_core::magnus::{magnus_eval, rho_w, GroupWord};
use shuffle_lab_core::unipotent::{verify_filtration_lemma, Modulus};
use shuffle_lab_core::verify::{all_checks, Profile};
use shuffle_lab_core::words::lyndon_words;
use shuffle_lab_core::{arith, indec, Alphabet, WordPoly, DEFAULT_SEED};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "shuffle-lab", version, about = "Shuffle algebra, Lyndon bases, unitriangular groups, and Magnus expansions", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the Lyndon words of one degree and compare the count to the
    /// necklace number phi_s(m)
    Lyndon {
        /// Alphabet size (e.g. 2) or explicit letters (e.g. xy)
        #[arg(long, default_value = "2")]
        alphabet: Alphabet,
        /// Word length s
        #[arg(short = 's', long = "degree")]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Shuffle two polynomial literals ("2*aab + aba" syntax; "" is the
    /// unit)
    Shuffle {
        f: String,
        g: String,
        #[arg(long, default_value = "2")]
        alphabet: Alphabet,
        #[arg(long)]
        json: bool,
    },
    /// Dimension of the degree-s indecomposable quotient mod p, against
    /// the necklace number
    Indec {
        #[arg(long, default_value = "2")]
        alphabet: Alphabet,
        /// Degree s
        #[arg(short = 's', long = "degree")]
        degree: usize,
        #[arg(short = 'p', long = "prime")]
        prime: u64,
        #[arg(long)]
        json: bool,
    },
    /// Lower p-central filtration and exponent of U_s(Z/p^(n-s+1))
    Unipotent {
        #[arg(long)]
        n: usize,
        /// Matrix size parameter s (matrices are (s+1) x (s+1))
        #[arg(short = 's', long = "degree")]
        degree: usize,
        #[arg(short = 'p', long = "prime")]
        prime: u64,
        /// Refuse to enumerate groups larger than this
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
        #[arg(long)]
        json: bool,
    },
    /// Magnus expansion of a group word (letters, with ^-1 or ' for
    /// inverses); with --word, also the attached unitriangular matrix
    Magnus {
        sigma: String,
        /// Window word w; entry (i,j) of the matrix is the coefficient of
        /// w[i..j]
        #[arg(short = 'w', long)]
        word: Option<String>,
        /// With --word: modulus exponent, so the matrix lives over
        /// Z/p^(n-|w|+1)
        #[arg(long)]
        n: Option<usize>,
        #[arg(short = 'p', long = "prime")]
        prime: Option<u64>,
        /// Without --word: coefficient modulus (prime power)
        #[arg(short = 'q', long = "modulus")]
        modulus: Option<u64>,
        /// Without --word: truncation degree
        #[arg(short = 's', long = "degree", default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value = "2")]
        alphabet: Alphabet,
        #[arg(long)]
        json: bool,
    },
    /// Run the whole acceptance battery
    Verify {
        /// quick (groups to 10^4, 100 trials) or full (10^6, 500-1000)
        #[arg(long, default_value = "full")]
        profile: Profile,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn letters_of(alphabet: &Alphabet) -> String {
    (0..alphabet.size()).map(|i| alphabet.name(i as u8)).collect()
}

fn parse_poly(literal: &str, alphabet: &Alphabet) -> shuffle_lab_core::Result<WordPoly> {
    if literal.trim().is_empty() {
        Ok(WordPoly::one())
    } else {
        WordPoly::parse(literal, alphabet)
    }
}

fn emit(json: bool, value: serde_json::Value, human: String) {
    if json {
        println!("{value}");
    } else {
        println!("{human}");
    }
}

fn cmd_lyndon(alphabet: Alphabet, degree: usize, json: bool) -> shuffle_lab_core::Result<bool> {
    let words = lyndon_words(&alphabet, degree);
    let rendered: Vec<String> = words.iter().map(|w| alphabet.render_word(w)).collect();
    let phi = match arith::necklace_phi_card(degree as u64, arith::Card::Fin(alphabet.size() as u64)) {
        arith::Card::Fin(v) => v,
        arith::Card::Inf => unreachable!("finite alphabet"),
    };
    let pass = phi == words.len() as u64;
    emit(
        json,
        serde_json::json!({
            "command": "lyndon",
            "alphabet": letters_of(&alphabet),
            "degree": degree,
            "words": rendered,
            "count": words.len(),
            "phi": phi,
            "match": pass,
        }),
        format!(
            "lyndon words over {{{}}}, degree {degree}: {}\ncount {} | phi {phi} | {}",
            letters_of(&alphabet),
            if rendered.is_empty() { "(none)".into() } else { rendered.join(" ") },
            words.len(),
            if pass { "match" } else { "MISMATCH" },
        ),
    );
    Ok(pass)
}

fn cmd_shuffle(f: &str, g: &str, alphabet: Alphabet, json: bool) -> shuffle_lab_core::Result<bool> {
    let fp = parse_poly(f, &alphabet)?;
    let gp = parse_poly(g, &alphabet)?;
    let product = fp.shuffle(&gp);
    emit(
        json,
        serde_json::json!({
            "command": "shuffle",
            "alphabet": letters_of(&alphabet),
            "f": fp.render(&alphabet),
            "g": gp.render(&alphabet),
            "product": product.render(&alphabet),
            "terms": product.to_json(&alphabet),
        }),
        product.render(&alphabet),
    );
    Ok(true)
}

fn cmd_indec(alphabet: Alphabet, degree: usize, prime: u64, json: bool) -> shuffle_lab_core::Result<bool> {
    let report = indec::indec_report(alphabet.size(), degree, prime)?;
    let pass = !report.formula_applies || report.matches;
    let verdict = match (report.formula_applies, report.matches) {
        (true, true) => "dim = phi, as the formula predicts for s < p",
        (true, false) => "dim != phi although s < p: FORMULA VIOLATED",
        (false, true) => "dim = phi even though s >= p leaves it unpromised",
        (false, false) => "dim != phi; expected, the formula only covers s < p",
    };
    emit(
        json,
        serde_json::json!({
            "command": "indec",
            "report": serde_json::to_value(&report).expect("report serializes"),
            "pass": pass,
        }),
        format!(
            "m={} s={} p={}: dim {} | phi {} | {} Lyndon words | decomposable rank {}\n{verdict}",
            report.m, report.s, report.p, report.dim, report.phi, report.lyndon_count,
            report.decomposable_rank,
        ),
    );
    Ok(pass)
}

fn cmd_unipotent(n: usize, s: usize, p: u64, cap: u64, json: bool) -> shuffle_lab_core::Result<bool> {
    let report = verify_filtration_lemma(n, s, p, cap)?;
    let human = format!(
        "U_{s}(Z/{q}): order {order}, filtration layers {layers}\n\
         layer {n} is the central Z/{p} in the corner: {a} | layer {next} trivial: {c} | exponent {measured} (formula {formula})\n{verdict}",
        q = report.q,
        order = report.order,
        layers = report
            .layers
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" "),
        a = yes_no(report.lemma_a && report.lemma_b),
        next = n + 1,
        c = yes_no(report.lemma_c),
        measured = report.exponent_measured,
        formula = report.exponent_formula,
        verdict = if report.pass { "PASS" } else { "FAIL" },
    );
    emit(
        json,
        serde_json::json!({
            "command": "unipotent",
            "report": serde_json::to_value(&report).expect("report serializes"),
        }),
        human,
    );
    Ok(report.pass)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_magnus(
    sigma: &str,
    word: Option<String>,
    n: Option<usize>,
    prime: Option<u64>,
    modulus: Option<u64>,
    degree: usize,
    alphabet: Alphabet,
    json: bool,
) -> shuffle_lab_core::Result<bool> {
    let sigma = GroupWord::parse(sigma, &alphabet)?;
    let bad = |msg: &str| shuffle_lab_core::Error::BadParameter(msg.into());
    if let Some(word) = word {
        let (n, p) = match (n, prime) {
            (Some(n), Some(p)) => (n, p),
            _ => return Err(bad("--word needs both --n and --prime")),
        };
        let w = alphabet.parse_word(&word)?;
        let matrix = rho_w(&sigma, &w, n, p)?;
        let series = magnus_eval(&sigma, matrix.modulus(), w.len());
        let rows = matrix.to_rows();
        let human_rows: Vec<String> = rows
            .iter()
            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        emit(
            json,
            serde_json::json!({
                "command": "magnus",
                "sigma": sigma.render(&alphabet),
                "w": alphabet.render_word(&w),
                "n": n,
                "p": p,
                "q": matrix.modulus().q,
                "series": series.to_json(&alphabet),
                "rho": rows,
            }),
            format!(
                "expansion of {} mod {}, through degree {}: {}\nmatrix for window {} (entries over Z/{}):\n  {}",
                sigma.render(&alphabet),
                matrix.modulus().q,
                w.len(),
                series.render(&alphabet),
                alphabet.render_word(&w),
                matrix.modulus().q,
                human_rows.join("\n  "),
            ),
        );
    } else {
        let q = modulus.ok_or_else(|| bad("need --modulus (or --word with --n/--prime)"))?;
        let series = magnus_eval(&sigma, Modulus::from_q(q)?, degree);
        emit(
            json,
            serde_json::json!({
                "command": "magnus",
                "sigma": sigma.render(&alphabet),
                "q": q,
                "degree": degree,
                "series": series.to_json(&alphabet),
            }),
            format!(
                "expansion of {} mod {q}, through degree {degree}: {}",
                sigma.render(&alphabet),
                series.render(&alphabet),
            ),
        );
    }
    Ok(true)
}

fn cmd_verify(profile: Profile, seed: u64, json: bool) -> shuffle_lab_core::Result<bool> {
    let profile_name = match profile {
        Profile::Quick => "quick",
        Profile::Full => "full",
    };
    if json {
        let checks = all_checks(profile, seed);
        let pass = checks.iter().all(|c| c.pass);
        println!(
            "{}",
            serde_json::json!({
                "command": "verify",
                "profile": profile_name,
                "seed": seed,
                "checks": serde_json::to_value(&checks).expect("outcomes serialize"),
                "pass": pass,
            })
        );
        Ok(pass)
    } else {
        let mut pass = true;
        let mut passed = 0;
        for (_, check) in shuffle_lab_core::verify::CHECKS {
            let started = std::time::Instant::now();
            let outcome = check(profile, seed);
            let elapsed = started.elapsed().as_secs_f64();
            println!(
                "{:<34} {}  [{elapsed:.1}s]  {}",
                outcome.name,
                if outcome.pass { "PASS" } else { "FAIL" },
                outcome.detail,
            );
            pass &= outcome.pass;
            passed += outcome.pass as u32;
        }
        println!(
            "{passed}/{} checks passed (profile {profile_name}, seed {seed})",
            shuffle_lab_core::verify::CHECKS.len(),
        );
        Ok(pass)
    }
}

fn run(cli: Cli) -> shuffle_lab_core::Result<bool> {
    match cli.command {
        Command::Lyndon { alphabet, degree, json } => cmd_lyndon(alphabet, degree, json),
        Command::Shuffle { f, g, alphabet, json } => cmd_shuffle(&f, &g, alphabet, json),
        Command::Indec { alphabet, degree, prime, json } => cmd_indec(alphabet, degree, prime, json),
        Command::Unipotent { n, degree, prime, cap, json } => cmd_unipotent(n, degree, prime, cap, json),
        Command::Magnus { sigma, word, n, prime, modulus, degree, alphabet, json } => {
            cmd_magnus(&sigma, word, n, prime, modulus, degree, alphabet, json)
        }
        Command::Verify { profile, seed, json } => cmd_verify(profile, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
