//! Command-line front end: exact decompositions, certified evaluations,
//! coefficient tables and bootstrap chains, as text or JSON.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use eichler_core::arith::{parse_rational, Complex, Mag, DEFAULT_PREC, GUARD_BITS};
use eichler_core::bootstrap::{
    bootstrap_chain_lenient, build_representation, eval_representation, evaluation_points, BootstrapConfig,
    DirectOracle, G2ESRepresentation,
};
use eichler_core::cocycle::ParabolicCocycle;
use eichler_core::eichler::{eichler_eval, EichlerIntegral};
use eichler_core::g2es::{triv_sym_expansions, Cutoff, MAX_C};
use eichler_core::modforms::{decompose_delta_power, default_decomposition_order, dims, eval_delta};
use eichler_core::serde_util::CertifiedJson;
use eichler_core::Error;

#[derive(Parser, Debug)]
#[command(name = "eichler", version, about = "Certified Eichler integrals and second order Eisenstein series")]
struct Cli {
    /// Working precision in bits (guard bits are added on top).
    #[arg(long, global = true, env = "EICHLER_PREC", default_value_t = DEFAULT_PREC)]
    prec: u32,

    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Delta^h as a combination of E_{12h} and products E_a E_{12h-a}.
    Decompose {
        #[arg(long)]
        h: u32,
    },
    /// Certified value of the Eichler integral of Delta.
    EvalEichler(EvalArgs),
    /// Fourier coefficients of E_k^{[1]}(.; phi^vee, j) for the cocycle of E(Delta).
    G2esCoeffs(CoeffArgs),
    /// Build representations of Delta^h E(Delta) along an ascending chain.
    Bootstrap(BootstrapArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Real and imaginary part of tau (decimals or p/q).
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_hyphen_values = true)]
    tau: Vec<String>,
    /// Evaluate through the representation of Delta^h E(Delta) instead of the
    /// Fourier series.
    #[arg(long)]
    h: Option<u32>,
    /// Absolute target error for the value.
    #[arg(long, default_value_t = 1e-30)]
    target_err: f64,
    /// Double-coset cutoff: a number or "auto".
    #[arg(long, default_value = "auto")]
    cmax: String,
}

#[derive(Args, Debug)]
struct CoeffArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    j: usize,
    /// Largest n.
    #[arg(long)]
    n: usize,
    /// Double-coset cutoff C.
    #[arg(long)]
    cmax: u64,
    /// Use the zero cocycle (all coefficients vanish).
    #[arg(long)]
    zero_cocycle: bool,
}

#[derive(Args, Debug)]
struct BootstrapArgs {
    /// Comma separated ascending list of h, starting at 2.
    #[arg(long)]
    chain: String,
    /// Target for the remainder coordinates of each stage, relative to their
    /// magnitudes.
    #[arg(long, default_value_t = 1e-3)]
    target_err: f64,
    /// Double-coset cutoff: a number or "auto".
    #[arg(long, default_value = "auto")]
    cmax: String,
    /// Solve the first stage after h = 2 from the Fourier series of E(Delta)
    /// instead of the h = 2 representation.
    #[arg(long)]
    direct: bool,
}

/// Failure with its exit code: 2 usage, 3 numeric target, 4 conditioning.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TargetUnreachable { .. } => 3,
            Error::IllConditioned { .. } => 4,
            Error::InvalidArgument(_) | Error::Precondition(_) | Error::Divergent(_) => 2,
            _ => 3,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn parse_cutoff(s: &str) -> Result<Cutoff, Failure> {
    if s == "auto" {
        return Ok(Cutoff::Auto);
    }
    match s.parse::<u64>() {
        Ok(c) if (1..=MAX_C).contains(&c) => Ok(Cutoff::Fixed(c)),
        _ => Err(usage(format!("--cmax must be \"auto\" or an integer in 1..={MAX_C}, got {s:?}"))),
    }
}

fn positive(x: f64, what: &str) -> Result<Mag, Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(Mag::from_f64(x))
    } else {
        Err(usage(format!("{what} must be positive, got {x}")))
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn describe(z: &Complex) -> String {
    format!("{} + {} i  (radius {})", z.re.mid_string(DIGITS), z.im.mid_string(DIGITS), CertifiedJson::from(z).radius)
}

fn cmd_decompose(h: u32, json: bool) -> Result<(), Failure> {
    if h == 0 {
        return Err(usage("--h must be at least 1"));
    }
    let dec = decompose_delta_power(h, default_decomposition_order(h))?;
    if json {
        print_json(&dec);
    } else {
        for (i, t) in dec.terms.iter().enumerate() {
            let prod = if t.left == 0 {
                format!("E_{}", t.right)
            } else {
                format!("E_{} E_{}", t.left, t.right)
            };
            println!("c_{} = {}    [{}]", i + 1, t.coeff, prod);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalOutput {
    tau: [String; 2],
    method: String,
    value: CertifiedJson,
    target_err: f64,
    target_met: bool,
}

fn cmd_eval(args: &EvalArgs, prec: u32, json: bool) -> Result<(), Failure> {
    let parts: Vec<_> = args.tau.iter().map(|s| parse_rational(s)).collect();
    let (re, im) = match parts.as_slice() {
        [Some(re), Some(im)] => (re.clone(), im.clone()),
        _ => return Err(usage(format!("--tau needs two numbers, got {:?}", args.tau))),
    };
    if im <= 0 {
        return Err(usage("Im tau must be positive"));
    }
    let target = positive(args.target_err, "--target-err")?;
    let cutoff = parse_cutoff(&args.cmax)?;
    let tau = Complex::from_rationals(prec, &re, &im);

    let (value, method) = match args.h {
        None => (eichler_eval(&EichlerIntegral::delta(), &tau, &target.mul_f64(0.5))?, "fourier".to_string()),
        Some(h) if h < 2 => return Err(usage("--h must be at least 2")),
        Some(h) => {
            let phi = ParabolicCocycle::for_delta(prec)?;
            let dh = eval_delta(&tau, &Mag::pow2(-(prec as i64)).mul(&Complex::e(&tau).abs_upper()))?.pow(h);
            let scaled = target.mul(&dh.abs_lower());
            // Dividing by Delta^h amplifies the remainder's radius, so for h > 2
            // the remainder is rebuilt more accurately until the target is met.
            let mut rel = BootstrapConfig::default().rel_target;
            let mut value;
            let mut rounds = 0;
            loop {
                let rep = representation_for(h, &phi, cutoff, rel)?;
                let v = match eval_representation(&rep, &phi, &tau, &scaled, cutoff) {
                    Ok(v) => v,
                    // certified cutoffs out of reach: report the fixed-cutoff value, flagged
                    Err(Error::TargetUnreachable { .. }) if cutoff == Cutoff::Auto => {
                        eval_representation(&rep, &phi, &tau, &scaled, Cutoff::Fixed(FALLBACK_C))?
                    }
                    Err(e) => return Err(e.into()),
                };
                value = &v / &dh;
                rounds += 1;
                let ratio = target.to_f64() / value.rad().to_f64();
                if h == 2 || ratio >= 1.0 || rel <= MIN_REL || rounds == 4 {
                    break;
                }
                rel = (rel * ratio * 0.25).max(MIN_REL);
            }
            (value, format!("representation h = {h}"))
        }
    };
    let met = value.rad().le(&target);
    if json {
        print_json(&EvalOutput {
            tau: [re.to_string(), im.to_string()],
            method,
            value: CertifiedJson::from(&value),
            target_err: args.target_err,
            target_met: met,
        });
    } else {
        println!("E(Delta)({re} + {im} i) = {}", describe(&value));
        println!("method: {method}");
        if !met {
            println!("warning: radius exceeds the target {:e}", args.target_err);
        }
    }
    if met {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            msg: "target error not reached; the printed value is certified only to its radius".into(),
        })
    }
}

/// Cutoff used when certified planning is out of reach.
const FALLBACK_C: u64 = 200;

/// Significant digits in text output.
const DIGITS: usize = 20;

/// Tightest relative target tried for a remainder.
const MIN_REL: f64 = 1e-60;

/// `h = 2` directly; larger `h` solved from the Fourier series of `E(Delta)`.
fn representation_for(h: u32, phi: &ParabolicCocycle, cutoff: Cutoff, rel_target: f64) -> Result<G2ESRepresentation, Failure> {
    let config = BootstrapConfig { rel_target, cutoff };
    if h == 2 {
        return Ok(bootstrap_chain_lenient(&[2], phi, &config)?.remove(0));
    }
    Ok(build_representation(h, &DirectOracle::new(), phi, &config)?)
}

#[derive(Serialize)]
struct CoeffRow {
    n: usize,
    value: CertifiedJson,
}

fn cmd_coeffs(args: &CoeffArgs, prec: u32, json: bool) -> Result<(), Failure> {
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if args.cmax == 0 || args.cmax > MAX_C {
        return Err(usage(format!("--cmax must lie in 1..={MAX_C}")));
    }
    let phi = if args.zero_cocycle {
        ParabolicCocycle::zero(12, prec)?
    } else {
        ParabolicCocycle::for_delta(prec)?
    };
    let e = triv_sym_expansions(&phi, &[args.k], args.j, args.n, args.cmax, prec)?.remove(0);
    let rows: Vec<CoeffRow> = (1..=args.n)
        .map(|n| CoeffRow {
            n,
            value: CertifiedJson::from(&e.coeffs[n]),
        })
        .collect();
    if json {
        print_json(&rows);
    } else {
        println!("# E_{}^[1](.; phi^vee, {}), C = {}", args.k, args.j, args.cmax);
        println!("# n  midpoint  radius");
        for (r, c) in rows.iter().zip(&e.coeffs[1..]) {
            println!("{}  {} + {} i  {}", r.n, c.re.mid_string(DIGITS), c.im.mid_string(DIGITS), r.value.radius);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StageOutput<'a> {
    representation: &'a G2ESRepresentation,
    /// Coordinates of the remainder in `Delta^i E_4^2 E_6^m`, when that basis exists.
    delta_e4sq_coordinates: Option<Vec<CertifiedJson>>,
}

fn cmd_bootstrap(args: &BootstrapArgs, prec: u32, json: bool) -> Result<(), Failure> {
    let hs: Vec<u32> = args
        .chain
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--chain must be a comma separated list of integers, got {:?}", args.chain)))?;
    if !(args.target_err > 0.0 && args.target_err < 1.0) {
        return Err(usage("--target-err is relative here and must lie in (0, 1)"));
    }
    let config = BootstrapConfig {
        rel_target: args.target_err,
        cutoff: parse_cutoff(&args.cmax)?,
    };
    if args.direct && hs.len() != 2 {
        return Err(usage("--direct needs a chain of exactly two stages"));
    }
    let phi = ParabolicCocycle::for_delta(prec)?;
    let run = |config: &BootstrapConfig| {
        if args.direct {
            bootstrap_chain_lenient(&hs[..1], &phi, config).and_then(|mut reps| {
                reps.push(build_representation(hs[1], &DirectOracle::new(), &phi, config)?);
                Ok(reps)
            })
        } else {
            bootstrap_chain_lenient(&hs, &phi, config)
        }
    };
    let result = match run(&config) {
        // certified cutoffs out of reach: rerun at the fixed cutoff, flagged
        Err(Error::TargetUnreachable { reason, .. }) if config.cutoff == Cutoff::Auto => {
            eprintln!("note: {reason}; falling back to --cmax {FALLBACK_C}");
            run(&BootstrapConfig {
                cutoff: Cutoff::Fixed(FALLBACK_C),
                ..config
            })
        }
        r => r,
    };
    let reps = match result {
        Ok(r) => r,
        Err(Error::IllConditioned { ratio, threshold }) => {
            let h = hs.iter().find(|&&h| h > 2).copied().unwrap_or(2);
            let dim = dims(12 * h as i64 - 10).map(|d| d.1).unwrap_or(0);
            let pts: Vec<String> = evaluation_points(dim).iter().map(|p| format!("{} + {} i", p.re, p.im)).collect();
            return Err(Failure {
                code: 4,
                msg: format!(
                    "evaluation points [{}] rejected for h = {h}: ratio {ratio:e} below {threshold:e}",
                    pts.join(", ")
                ),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let stages: Vec<StageOutput> = reps
        .iter()
        .map(|r| StageOutput {
            representation: r,
            delta_e4sq_coordinates: r
                .remainder
                .delta_e4sq_coordinates()
                .ok()
                .filter(|d| !d.is_empty())
                .map(|d| d.iter().map(CertifiedJson::from).collect()),
        })
        .collect();
    if json {
        print_json(&stages);
    } else {
        for s in &stages {
            let r = s.representation;
            println!("h = {}: Delta^{} E(Delta) = f - sum_i c_i E_a E^[1]_b", r.h, r.h);
            for t in &r.terms {
                println!("  c = {}  a = {}  b = {}", t.coeff, t.classical, t.g2es_weight);
            }
            if r.remainder.is_zero() {
                println!("  f = 0");
            } else {
                for (n, a) in r.remainder.coefficients.iter().enumerate().skip(1) {
                    println!("  f: q^{n} coefficient {}", describe(a));
                }
            }
            if let Some(d) = &r.diagnostics {
                println!("  det = {}, conditioning ratio {:.3e}", describe(&d.determinant), d.condition_ratio);
                for (p, v) in d.points.iter().zip(&d.values) {
                    println!("  at {} + {} i: {}", p.re, p.im, describe(v));
                }
            }
            if let Some(ds) = r.remainder.delta_e4sq_coordinates().ok().filter(|d| !d.is_empty()) {
                for (i, d) in ds.iter().enumerate() {
                    println!("  d_{} = {}", i + 1, describe(d));
                }
            }
            if !r.target_met() {
                println!("  warning: target not met");
            }
        }
    }
    if reps.iter().all(|r| r.target_met()) {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            msg: "compounded radii exceed the relative target; results are flagged".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.prec < 32 {
        eprintln!("error: --prec must be at least 32");
        return ExitCode::from(2);
    }
    let prec = cli.prec + GUARD_BITS;
    let res = match &cli.cmd {
        Cmd::Decompose { h } => cmd_decompose(*h, cli.json),
        Cmd::EvalEichler(a) => cmd_eval(a, prec, cli.json),
        Cmd::G2esCoeffs(a) => cmd_coeffs(a, prec, cli.json),
        Cmd::Bootstrap(a) => cmd_bootstrap(a, prec, cli.json),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
