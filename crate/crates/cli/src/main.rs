mod demo;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use arithdyn::abelian::{counterexample_report, general_isogeny_report, require_supported_algebra, theta_matrix};
use arithdyn::fan::{is_complete, product, star_fan, validate, ConeRef};
use arithdyn::heights::elliptic::{canonical_height, ec_add, ec_multiply, exe_classify, torsion_order, Curve, EPoint};
use arithdyn::heights::{alpha_estimate, weil_height, AlphaConfig, ProjPoint};
use arithdyn::rational::display;
use arithdyn::ratmat::IntMatrix;
use arithdyn::toric_divisors::{
    class_group, is_nef, nef_cone_rays, nef_violation, potential_arithmetic_degrees, pullback_action_from_matrix,
    pullback_matrix, realizability_report_equivariant, PullbackAction, TDivisor,
};
use arithdyn::toric_endo::{
    check_compatible, eigen_fan_decomposition, is_simple, nonpolarized_witness, ray_permutation, stabilizing_power,
    LatticeEndo, Simplicity,
};
use arithdyn::{Error, ErrorKind, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "arithdyn", version, about = "Exact dynamics of toric, abelian and elliptic endomorphisms")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fan validation, simplicity, stars and products.
    #[command(subcommand)]
    Fan(FanCmd),
    /// Lattice endomorphisms acting on a fan.
    #[command(subcommand)]
    Endo(EndoCmd),
    /// Divisor classes, pullbacks and nef cones.
    #[command(subcommand)]
    Ns(NsCmd),
    /// Abelian surfaces with endomorphism algebra M2(Q).
    #[command(subcommand)]
    Abelian(AbelianCmd),
    /// Weil heights and arithmetic-degree estimates.
    #[command(subcommand)]
    Height(HeightCmd),
    /// Elliptic-curve group law and canonical heights.
    #[command(subcommand)]
    Elliptic(EllipticCmd),
    /// The isogeny (P, Q) -> (aP, bQ) on E x E.
    #[command(subcommand)]
    Exe(ExeCmd),
    /// Run every acceptance computation and report pass/fail per row.
    Demo {
        /// Directory with replacement fan fixtures (p2, p1xp1, hirzebruch2, p2xp1).
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FanArg {
    /// Fan JSON file or bundled fixture name (p2, p1xp1, hirzebruch2, p2xp1).
    #[arg(long)]
    fan: String,
}

#[derive(Args)]
struct EndoArg {
    #[command(flatten)]
    fan: FanArg,
    /// Lattice map as a JSON file or inline rows, e.g. "2,0;0,3".
    #[arg(long, alias = "matrix", conflicts_with = "scalar")]
    endo: Option<String>,
    /// Use n times the identity.
    #[arg(long)]
    scalar: Option<i64>,
}

#[derive(Subcommand)]
enum FanCmd {
    Validate(FanArg),
    Simple(FanArg),
    Star {
        #[command(flatten)]
        fan: FanArg,
        /// Ray indices of the cone, e.g. "0" or "0,1".
        #[arg(long)]
        cone: String,
    },
    Product {
        #[command(flatten)]
        fan: FanArg,
        /// Second factor.
        #[arg(long)]
        with: String,
    },
}

#[derive(Subcommand)]
enum EndoCmd {
    Check(EndoArg),
    Permutation(EndoArg),
    Decompose(EndoArg),
    Witness {
        #[command(flatten)]
        fan: FanArg,
        #[arg(long)]
        n1: i64,
        #[arg(long)]
        n2: i64,
    },
}

#[derive(Args)]
struct ActionArg {
    #[command(flatten)]
    endo: EndoArg,
    /// A class-group matrix in the section basis, instead of a lattice map.
    #[arg(long, conflicts_with_all = ["endo", "scalar"])]
    action: Option<String>,
}

#[derive(Subcommand)]
enum NsCmd {
    Classgroup(FanArg),
    Pullback(ActionArg),
    Potdeg(ActionArg),
    Nef {
        #[command(flatten)]
        fan: FanArg,
        /// Ray coefficients as a JSON file/array or inline "1,0,0".
        #[arg(long)]
        divisor: String,
    },
    Nefcone(FanArg),
    RealizeEquivariant {
        #[command(flatten)]
        endo: EndoArg,
        #[arg(long, default_value_t = 10)]
        iters: usize,
    },
}

#[derive(Subcommand)]
enum AbelianCmd {
    Theta {
        /// 2x2 matrix of the isogeny, JSON file or inline "3,0;0,2".
        #[arg(long)]
        matrix: String,
        /// Assume the abelian surface is simple.
        #[arg(long)]
        simple: bool,
        #[arg(long, default_value = "m2q")]
        algebra: String,
    },
    Counterexample {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
    },
}

#[derive(Subcommand)]
enum HeightCmd {
    Weil {
        /// Point such as "3,1;5,2".
        #[arg(long)]
        point: String,
    },
    Alpha {
        /// System JSON file or bundled name (square, sum_squares_over_product).
        #[arg(long)]
        system: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 10)]
        iters: usize,
    },
}

#[derive(Args)]
struct CurveArg {
    /// Coefficients "a,b" of y^2 = x^3 + ax + b.
    #[arg(long, allow_hyphen_values = true)]
    curve: String,
}

#[derive(Subcommand)]
enum EllipticCmd {
    Add {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long = "p", allow_hyphen_values = true)]
        p: String,
        #[arg(long = "q", allow_hyphen_values = true)]
        q: String,
    },
    Multiply {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    Canheight {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    Torsion {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand)]
enum ExeCmd {
    Classify {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long = "P", allow_hyphen_values = true)]
        p: String,
        #[arg(long = "Q", allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Assert that the curve has no complex multiplication.
        #[arg(long)]
        non_cm: bool,
    },
}

/// A successful command result together with the tags of the facts it relies on.
struct Outcome {
    result: Value,
    citations: Vec<&'static str>,
    exit: u8,
}

impl Outcome {
    fn ok(result: Value, citations: &[&'static str]) -> Self {
        Outcome { result, citations: citations.to_vec(), exit: 0 }
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 2,
        ErrorKind::Capacity => 3,
        ErrorKind::Unsupported => 4,
        ErrorKind::Internal => 1,
    }
}

fn error_object(e: &Error) -> Value {
    let kind = match e.kind() {
        ErrorKind::Validation => "validation",
        ErrorKind::Capacity => "capacity",
        ErrorKind::Unsupported => "unsupported",
        ErrorKind::Internal => "internal",
    };
    let mut v = json!({ "kind": kind, "tag": e.tag(), "message": e.to_string() });
    if let Error::DigitBudget { budget, completed, partial_heights } = e {
        v["budget"] = json!(budget);
        v["completed"] = json!(completed);
        v["partial_heights"] = json!(partial_heights);
    }
    v
}

fn load_endo(a: &EndoArg) -> Result<LatticeEndo> {
    let fan = input::fan(&a.fan.fan)?;
    match (&a.endo, a.scalar) {
        (Some(m), None) => LatticeEndo::new(input::int_matrix(m)?, fan),
        (None, Some(n)) => LatticeEndo::scalar(&fan, n),
        _ => Err(Error::Invalid("give exactly one of --endo or --scalar".into())),
    }
}

fn load_action(a: &ActionArg) -> Result<(PullbackAction, Value)> {
    match &a.action {
        Some(m) => {
            let fan = input::fan(&a.endo.fan.fan)?;
            let matrix = input::rat_matrix(m)?;
            let echo = json!({ "action": matrix.display_rows() });
            Ok((pullback_action_from_matrix(&fan, matrix)?, echo))
        }
        None => {
            let endo = load_endo(&a.endo)?;
            let echo = json!({ "lattice_map": endo.matrix.display_rows() });
            Ok((pullback_matrix(&endo)?, echo))
        }
    }
}

fn curve(c: &CurveArg) -> Result<Curve> {
    Curve::parse(&c.curve)
}

fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Fan(c) => run_fan(c),
        Command::Endo(c) => run_endo(c),
        Command::Ns(c) => run_ns(c),
        Command::Abelian(c) => run_abelian(c),
        Command::Height(c) => run_height(c),
        Command::Elliptic(c) => run_elliptic(c),
        Command::Exe(c) => run_exe(c),
        Command::Demo { fixtures } => {
            let (report, all_passed) = demo::run(fixtures.as_deref())?;
            Ok(Outcome { result: report, citations: demo::CITATIONS.to_vec(), exit: if all_passed { 0 } else { 1 } })
        }
    }
}

fn run_fan(c: &FanCmd) -> Result<Outcome> {
    match c {
        FanCmd::Validate(a) => {
            let f = input::raw_fan(&a.fan)?;
            let report = validate(&f);
            let complete = if report.valid && report.simplicial && f.is_pure() { is_complete(&f).ok() } else { None };
            let mut v = serde_json::to_value(&report).map_err(|e| Error::Consistency(e.to_string()))?;
            v["complete"] = json!(complete);
            v["fan"] = f.to_json();
            Ok(Outcome { exit: if report.valid { 0 } else { 2 }, ..Outcome::ok(v, &["fan-axioms"]) })
        }
        FanCmd::Simple(a) => {
            let f = input::fan(&a.fan)?;
            let s = is_simple(&f)?;
            Ok(Outcome::ok(s.to_json(), &["simple-toric-variety", "product-decomposition-search"]))
        }
        FanCmd::Star { fan, cone } => {
            let f = input::fan(&fan.fan)?;
            let s = star_fan(&f, &ConeRef::new(input::index_list(cone)?))?;
            Ok(Outcome::ok(s.to_json(), &["orbit-closure-star-fan"]))
        }
        FanCmd::Product { fan, with } => {
            let p = product(&input::fan(&fan.fan)?, &input::fan(with)?);
            let report = validate(&p);
            Ok(Outcome::ok(
                json!({ "fan": p.to_json(), "valid": report.valid, "complete": is_complete(&p).ok() }),
                &["product-fan"],
            ))
        }
    }
}

fn run_endo(c: &EndoCmd) -> Result<Outcome> {
    match c {
        EndoCmd::Check(a) => {
            let f = input::fan(&a.fan.fan)?;
            let m = match (&a.endo, a.scalar) {
                (Some(m), None) => input::int_matrix(m)?,
                (None, Some(n)) => IntMatrix::scalar(f.dim, n),
                _ => return Err(Error::Invalid("give exactly one of --endo or --scalar".into())),
            };
            let c = check_compatible(&m, &f)?;
            let mut v = c.to_json();
            v["lattice_map"] = json!(m.display_rows());
            Ok(Outcome::ok(v, &["equivariant-morphism-cone-condition"]))
        }
        EndoCmd::Permutation(a) => {
            let e = load_endo(a)?;
            let mut v = ray_permutation(&e)?.to_json();
            v["stabilizing_power"] = json!(stabilizing_power(&e)?);
            Ok(Outcome::ok(v, &["rays-permuted-by-surjective-endomorphisms"]))
        }
        EndoCmd::Decompose(a) => {
            let e = load_endo(a)?;
            Ok(Outcome::ok(eigen_fan_decomposition(&e)?.to_json(), &["eigen-fan-decomposition"]))
        }
        EndoCmd::Witness { fan, n1, n2 } => {
            let f = input::fan(&fan.fan)?;
            let Simplicity::Decomposable(parts) = is_simple(&f)? else {
                return Err(Error::Hypothesis("fan is simple: every endomorphism iterate acts by a scalar".into()));
            };
            let w = nonpolarized_witness(&f, &parts, *n1, *n2)?;
            let pull = pullback_matrix(&w)?;
            Ok(Outcome::ok(
                json!({
                    "lattice_map": w.matrix.display_rows(),
                    "factors": parts.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                    "pullback": pull.matrix.display_rows(),
                    "pullback_eigenvalues": pull.eigen.values().iter().map(display).collect::<Vec<_>>(),
                }),
                &["non-polarized-product-endomorphism", "simple-toric-variety"],
            ))
        }
    }
}

fn run_ns(c: &NsCmd) -> Result<Outcome> {
    match c {
        NsCmd::Classgroup(a) => {
            let f = input::fan(&a.fan)?;
            Ok(Outcome::ok(class_group(&f)?.to_json(), &["class-group-presentation"]))
        }
        NsCmd::Pullback(a) => {
            let (act, echo) = load_action(a)?;
            let mut v = act.to_json();
            v["input"] = echo;
            Ok(Outcome::ok(v, &["toric-support-function-pullback", "pullback-contravariance"]))
        }
        NsCmd::Potdeg(a) => {
            let (act, echo) = load_action(a)?;
            let pd = potential_arithmetic_degrees(&act);
            Ok(Outcome::ok(
                json!({
                    "input": echo,
                    "section": act.class_group.section,
                    "dynamical_degree": act.eigen.spectral_radius(),
                    "potential_arithmetic_degrees": pd.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
                    "warnings": act.warnings,
                }),
                &["potential-arithmetic-degree", "nef-eigendivisor-feasibility"],
            ))
        }
        NsCmd::Nef { fan, divisor } => {
            let f = input::fan(&fan.fan)?;
            let d = TDivisor::new(&f, input::rat_vector(divisor)?)?;
            let violation = nef_violation(&f, &d)?;
            Ok(Outcome::ok(
                json!({
                    "divisor": d.to_json(),
                    "nef": is_nef(&f, &d)?,
                    "violation": violation.map(|(c, r)| json!({ "cone": c, "ray": r })),
                }),
                &["toric-nef-convexity"],
            ))
        }
        NsCmd::Nefcone(a) => {
            let f = input::fan(&a.fan)?;
            let cg = class_group(&f)?;
            let rays = nef_cone_rays(&f)?;
            Ok(Outcome::ok(
                json!({
                    "section": cg.section,
                    "rays": rays.iter().map(|r| r.iter().map(display).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }),
                &["toric-nef-convexity", "nef-cone-finitely-generated"],
            ))
        }
        NsCmd::RealizeEquivariant { endo, iters } => {
            let e = load_endo(endo)?;
            let r = realizability_report_equivariant(&e, *iters, AlphaConfig::from_env()?)?;
            Ok(Outcome::ok(r.to_json(), &["equivariant-realizability", "product-arithmetic-degree"]))
        }
    }
}

fn run_abelian(c: &AbelianCmd) -> Result<Outcome> {
    match c {
        AbelianCmd::Theta { matrix, simple, algebra } => {
            require_supported_algebra(algebra)?;
            let f = input::rat_matrix(matrix)?;
            if f.is_integral() {
                let r = general_isogeny_report(&f, *simple)?;
                let mut cites: Vec<&'static str> = r.labels.iter().flat_map(|l| l.citations.clone()).collect();
                cites.push("rosati-pullback-formula");
                cites.sort_unstable();
                cites.dedup();
                Ok(Outcome::ok(r.to_json(), &cites))
            } else {
                Ok(Outcome::ok(theta_matrix(&f)?.to_json(), &["rosati-pullback-formula"]))
            }
        }
        AbelianCmd::Counterexample { a, b } => {
            let r = counterexample_report(*a, *b)?;
            let mut cites: Vec<&'static str> = r.labels.iter().flat_map(|l| l.citations.clone()).collect();
            cites.sort_unstable();
            cites.dedup();
            Ok(Outcome::ok(r.to_json(), &cites))
        }
    }
}

fn run_height(c: &HeightCmd) -> Result<Outcome> {
    match c {
        HeightCmd::Weil { point } => {
            let p = ProjPoint::parse(point)?;
            let h = weil_height(&p);
            Ok(Outcome::ok(
                json!({
                    "point": p.to_json(),
                    "height": h.value,
                    "max_abs": h.max_abs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                }),
                &["weil-height"],
            ))
        }
        HeightCmd::Alpha { system, point, iters } => {
            let sys = input::system(system)?;
            let p = ProjPoint::parse(point)?;
            let est = alpha_estimate(&sys, &p, *iters, AlphaConfig::from_env()?)?;
            let mut v = est.to_json();
            v["system"] = sys.to_json();
            v["point"] = p.to_json();
            Ok(Outcome::ok(v, &["arithmetic-degree-limit"]))
        }
    }
}

fn run_elliptic(c: &EllipticCmd) -> Result<Outcome> {
    match c {
        EllipticCmd::Add { curve: cv, p, q } => {
            let e = curve(cv)?;
            let r = ec_add(&e, &EPoint::parse(p)?, &EPoint::parse(q)?)?;
            Ok(Outcome::ok(
                json!({ "curve": e.to_json(), "sum": r.to_json(), "display": r.to_string() }),
                &["elliptic-group-law"],
            ))
        }
        EllipticCmd::Multiply { curve: cv, point, k } => {
            let e = curve(cv)?;
            let r = ec_multiply(&e, &EPoint::parse(point)?, &(*k).into())?;
            Ok(Outcome::ok(
                json!({ "curve": e.to_json(), "k": k, "product": r.to_json(), "display": r.to_string() }),
                &["elliptic-group-law"],
            ))
        }
        EllipticCmd::Canheight { curve: cv, point, depth } => {
            let e = curve(cv)?;
            let h = canonical_height(&e, &EPoint::parse(point)?, *depth)?;
            Ok(Outcome::ok(h.to_json(), &["canonical-height-doubling-limit"]))
        }
        EllipticCmd::Torsion { curve: cv, point } => {
            let e = curve(cv)?;
            let order = torsion_order(&e, &EPoint::parse(point)?)?;
            Ok(Outcome::ok(json!({ "torsion": order.is_some(), "order": order }), &["rational-torsion-bound"]))
        }
    }
}

fn run_exe(c: &ExeCmd) -> Result<Outcome> {
    let ExeCmd::Classify { a, b, curve: cv, p, q, depth, non_cm } = c;
    let e = curve(cv)?;
    let r = exe_classify(&e, *a, *b, &EPoint::parse(p)?, &EPoint::parse(q)?, *depth, *non_cm)?;
    let mut v = r.to_json();
    v["notes"] = json!([
        "the classification uses only torsion of P and Q; the value set {a^2, b^2, 1} does not depend on the CM assumption",
        if *non_cm { "curve asserted to be without complex multiplication" } else { "CM status not asserted" },
    ]);
    Ok(Outcome::ok(v, &["product-isogeny-arithmetic-degree", "canonical-height-doubling-limit"]))
}

fn emit(out: Option<&PathBuf>, v: &Value) -> std::result::Result<(), String> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let (report, code) = match run(&cli.command) {
        Ok(o) => (
            json!({
                "schema_version": SCHEMA_VERSION,
                "command": echo,
                "result": o.result,
                "citations": o.citations,
            }),
            o.exit,
        ),
        Err(e) => {
            eprintln!("error: {e}");
            (
                json!({ "schema_version": SCHEMA_VERSION, "command": echo, "error": error_object(&e) }),
                exit_code(e.kind()),
            )
        }
    };
    if let Err(msg) = emit(cli.out.as_ref(), &report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
