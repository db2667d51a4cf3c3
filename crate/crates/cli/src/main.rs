use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dkhov::arc_algebra::{contract_triple, multiply};
use dkhov::cups::render;
use dkhov::hecke::{check_associativity, verify_relations, FamilySelector, Status};
use dkhov::weights::contract_weight;
use dkhov::{all_weights, circle_basis, cup_diagram, kl_poly, OrientedTriple, Weight};

#[derive(Parser)]
#[command(name = "dkhov", version, about = "Type D generalised Khovanov arc algebra calculator")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the oriented circle diagram basis with degrees.
    Basis { n: usize },
    /// Multiply two basis diagrams given as `bottom,orient,top`.
    Mult { n: usize, a: String, b: String },
    /// Check the relations of the presentation (a family name or `all`).
    Verify {
        n: usize,
        family: String,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also check associativity on seeded random triples.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Print only failing configurations and the summary.
        #[arg(long)]
        quiet: bool,
    },
    /// KL polynomial of a pair `lam mu`, or the full table with `all`.
    Kl { n: usize, lam: String, mu: Option<String> },
    /// Contract a weight or a `bottom,orient,top` diagram at `k`.
    Contract { n: usize, k: usize, input: String },
    /// Draw a weight's cup diagram, or a diagram's caps, orientation and cups.
    Render { input: String },
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn weight(n: usize, s: &str) -> Result<Weight, Failure> {
    let w: Weight = s.parse()?;
    if w.n() != n {
        return Err(Failure::Usage(format!("weight {s} has length {}, expected n = {n}", w.n())));
    }
    Ok(w)
}

fn triple(n: usize, s: &str) -> Result<OrientedTriple, Failure> {
    let t: OrientedTriple = s.parse()?;
    if t.n() != n {
        return Err(Failure::Usage(format!("diagram {s} has n = {}, expected n = {n}", t.n())));
    }
    Ok(t)
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serialisable")
}

fn basis(n: usize, as_json: bool) -> Out {
    let b = circle_basis(n)?;
    if as_json {
        let rows: Vec<serde_json::Value> = b
            .iter()
            .map(|t| serde_json::json!({"bottom": t.bottom, "orient": t.orient, "top": t.top, "degree": t.degree()}))
            .collect();
        return Ok(json(&rows) + "\n");
    }
    let mut s = String::new();
    for t in &b {
        writeln!(s, "{t} deg={}", t.degree()).unwrap();
    }
    Ok(s)
}

fn mult(n: usize, a: &str, b: &str, as_json: bool) -> Out {
    let p = multiply(&triple(n, a)?, &triple(n, b)?)?;
    Ok(if as_json { format!("{}\n", json(&p)) } else { format!("{p}\n{}\n", json(&p)) })
}

fn verify(n: usize, family: &str, jobs: usize, seed: Option<u64>, samples: usize, quiet: bool, as_json: bool) -> Out {
    let sel: FamilySelector = family.parse()?;
    let rep = verify_relations(n, sel, jobs)?;
    let assoc = seed.map(|s| check_associativity(n, Some(samples), s)).transpose()?;
    let bad = rep.mismatches() + assoc.as_ref().map_or(0, |a| a.failures.len());
    let mut s = String::new();
    if as_json {
        let v = serde_json::json!({
            "n": n,
            "checked": rep.checked(),
            "mismatches": bad,
            "outcomes": rep.outcomes.iter().filter(|o| !quiet || o.status != Status::Ok).collect::<Vec<_>>(),
            "associativity": assoc,
        });
        s = json(&v) + "\n";
    } else {
        for o in rep.outcomes.iter().filter(|o| !quiet || o.status != Status::Ok) {
            writeln!(s, "{o}").unwrap();
        }
        if let Some(a) = &assoc {
            writeln!(s, "associativity n={n} samples={} failures={}", a.checked, a.failures.len()).unwrap();
            for f in &a.failures {
                writeln!(s, "associativity MISMATCH {f}").unwrap();
            }
        }
        if bad == 0 {
            writeln!(s, "OK: 0 mismatches").unwrap();
        } else {
            writeln!(s, "FAILED: {bad} mismatches").unwrap();
        }
    }
    if bad == 0 {
        Ok(s)
    } else {
        Err(Failure::Mismatch(s))
    }
}

fn kl(n: usize, lam: &str, mu: Option<&str>, as_json: bool) -> Out {
    let pairs: Vec<(Weight, Weight)> = match (lam, mu) {
        ("all", None) => {
            let ws = all_weights(n)?;
            ws.iter().flat_map(|l| ws.iter().map(move |m| (l.clone(), m.clone()))).collect()
        }
        (l, Some(m)) => vec![(weight(n, l)?, weight(n, m)?)],
        (_, None) => return Err(Failure::Usage("kl needs two weights or `all`".into())),
    };
    let single = pairs.len() == 1;
    let mut rows = Vec::new();
    for (l, m) in pairs {
        let p = kl_poly(&l, &m)?;
        if single || !p.value.is_zero() {
            rows.push((l, m, p));
        }
    }
    if as_json {
        let v: Vec<serde_json::Value> = rows
            .iter()
            .map(|(l, m, p)| serde_json::json!({"lam": l, "mu": m, "poly": p.value.to_term_strings()}))
            .collect();
        return Ok(json(&v) + "\n");
    }
    let mut s = String::new();
    for (l, m, p) in rows {
        if single {
            writeln!(s, "{p}").unwrap();
        } else {
            writeln!(s, "{l} {m} {p}").unwrap();
        }
    }
    Ok(s)
}

fn contract(n: usize, k: usize, input: &str, as_json: bool) -> Out {
    if input.contains(',') {
        let t = contract_triple(&triple(n, input)?, k)?;
        return Ok(if as_json { json(&t) + "\n" } else { format!("{t}\n") });
    }
    let w = contract_weight(&weight(n, input)?, k)?;
    Ok(if as_json { json(&w) + "\n" } else { format!("{w}\n") })
}

fn render_input(input: &str, as_json: bool) -> Out {
    if input.contains(',') {
        let t: OrientedTriple = input.parse()?;
        let (caps, cups) = (render(&cup_diagram(&t.top)), render(&cup_diagram(&t.bottom)));
        if as_json {
            let v = serde_json::json!({"caps": caps, "orient": t.orient, "cups": cups, "degree": t.degree()});
            return Ok(json(&v) + "\n");
        }
        return Ok(format!("caps   {caps}\nweight {}\ncups   {cups}\n", t.orient));
    }
    let w: Weight = input.parse()?;
    let cups = render(&cup_diagram(&w));
    if as_json {
        return Ok(json(&serde_json::json!({"weight": w, "cups": cups})) + "\n");
    }
    Ok(format!("weight {w}\ncups   {cups}\n"))
}

fn run(cli: Cli) -> Out {
    let j = cli.json;
    match cli.cmd {
        Cmd::Basis { n } => basis(n, j),
        Cmd::Mult { n, a, b } => mult(n, &a, &b, j),
        Cmd::Verify { n, family, jobs, seed, samples, quiet } => verify(n, &family, jobs, seed, samples, quiet, j),
        Cmd::Kl { n, lam, mu } => kl(n, &lam, mu.as_deref(), j),
        Cmd::Contract { n, k, input } => contract(n, k, &input, j),
        Cmd::Render { input } => render_input(&input, j),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(Failure::Mismatch(s)) => {
            print!("{s}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
