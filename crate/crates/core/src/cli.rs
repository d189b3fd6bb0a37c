//! Command-line front end.
//!
//! Exit codes: 0 verified, 1 verification failed, 2 bad input, 3 I/O error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::constructions::{self, gens};
use crate::lemma1::{Lemma1Ctx, Lemma1Names};
use crate::numbers::{parse_rational, QuadIrr, Rational};
use crate::par::Exec;
use crate::pipeline::{self, DistortionRow};
use crate::words::{GenId, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "circle-distortion", about = "Exact distortion certificates for irrational rotations")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every claim about the H_1..H_5 tower for each beta.
    Verify(VerifyArgs),
    /// Build h_n and check it against the rotation on (0, a).
    Lemma1(Lemma1Args),
    /// Emit the word-length growth table.
    Distortion(DistortionArgs),
    /// Expand the group identity and print its exponent data.
    Expand(ExpandArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Exact rational in (0, 1/1000), e.g. 1/2048. Repeatable.
    #[arg(long = "beta", required = true)]
    pub betas: Vec<String>,
    #[arg(long, default_value = "quad:-1,1,2")]
    pub alpha: String,
    /// Print the H_i maps.
    #[arg(long)]
    pub dump: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct Lemma1Args {
    #[arg(long, default_value_t = 1024)]
    pub n: u64,
    #[arg(long, default_value = "9/10")]
    pub a: String,
    #[arg(long, default_value_t = 21)]
    pub m: u32,
    #[arg(long, default_value = "quad:-1,1,2")]
    pub alpha: String,
    /// Print the word and its value as a map.
    #[arg(long)]
    pub dump: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DistortionArgs {
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    #[arg(long, default_value = "quad:-1,1,2")]
    pub alpha: String,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write an SVG chart of word length against log2(n).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Build rows one at a time on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub json: bool,
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cfg.command {
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Lemma1(a) => cmd_lemma1(&a, out),
        Command::Distortion(a) => cmd_distortion(&a, out),
        Command::Expand(a) => cmd_expand(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_IO
        }
    }
}

enum CliError {
    Usage(String),
    Io(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn print(out: &mut dyn Write, s: &str) -> Result<(), CliError> {
    out.write_all(s.as_bytes()).map_err(io_err)
}

fn parse_alpha(s: &str) -> Result<QuadIrr, CliError> {
    s.parse::<QuadIrr>().map_err(usage)
}

fn parse_exact(s: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(s).ok_or_else(|| usage(format!("{what} must be an exact rational p/q, got {s:?}")))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let alpha = parse_alpha(&args.alpha)?;
    let betas = args
        .betas
        .iter()
        .map(|s| {
            let b = alpha.rational(parse_exact(s, "beta")?);
            if !constructions::beta_in_range(&b) {
                return Err(usage(format!("beta = {s} is outside (0, 1/1000)")));
            }
            Ok(b)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut all_ok = true;
    let mut reports = Vec::new();
    for beta in &betas {
        let report = constructions::verify_lemma2(beta).map_err(usage)?;
        all_ok &= report.overall;
        if args.json {
            reports.push(report.to_json());
        } else {
            print(out, &format!("{report}\n"))?;
        }
        if args.dump {
            let tower = constructions::Tower::new(beta).map_err(usage)?;
            for (i, h) in tower.h.iter().enumerate() {
                print(out, &format!("# H{} (beta = {beta})\n{h}", i + 1))?;
            }
        }
    }
    if args.json {
        print(out, &format!("{}\n", serde_json::to_string_pretty(&json!(reports)).expect("json")))?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_lemma1(args: &Lemma1Args, out: &mut dyn Write) -> Result<i32, CliError> {
    let alpha = parse_alpha(&args.alpha)?;
    let a = parse_exact(&args.a, "a")?;
    let ctx = Lemma1Ctx::new(alpha.alpha(), a, args.m, Lemma1Names::default()).map_err(usage)?;
    let check = ctx.check(args.n).map_err(usage)?;
    if args.json {
        let v = json!({
            "n": check.n,
            "length": check.length,
            "bound": check.bound,
            "agrees": check.agrees,
        });
        print(out, &format!("{v}\n"))?;
    } else {
        print(out, &format!("n={} length={} bound={} agrees={}\n", check.n, check.length, check.bound, check.agrees))?;
    }
    if args.dump {
        let word = ctx.h_word(args.n).map_err(usage)?;
        let map = word.evaluate(ctx.assignment()).map_err(usage)?;
        print(out, &format!("# word\n{word}\n# map\n{map}"))?;
    }
    Ok(if check.ok() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_distortion(args: &DistortionArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if args.count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let alpha = parse_alpha(&args.alpha)?;
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let rows = pipeline::distortion_table_with(&alpha, args.count, exec).map_err(usage)?;
    let csv = pipeline::to_csv(&rows);
    match &args.csv {
        Some(path) => std::fs::write(path, &csv).map_err(|e| io_err(format!("{}: {e}", path.display())))?,
        None if !args.json => print(out, &csv)?,
        None => {}
    }
    if args.json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "n": r.n,
                    "frac_n_alpha": r.frac_n_alpha.to_string(),
                    "target_power": r.target_power,
                    "word_len": r.word_len,
                    "bound": r.bound,
                    "ratio_linear": r.ratio_linear.to_string(),
                    "verified": r.verified,
                })
            })
            .collect();
        print(out, &format!("{}\n", serde_json::to_string_pretty(&v).expect("json")))?;
    }
    if let Some(path) = &args.svg {
        std::fs::write(path, render_svg(&rows)).map_err(|e| io_err(format!("{}: {e}", path.display())))?;
    }
    Ok(if rows.iter().all(|r| r.verified) { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_expand(args: &ExpandArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let eq = constructions::identity_equation();
    let x = GenId::new(gens::X);
    let (net_l, net_r) = (eq.lhs.net_exponent(&x), eq.rhs.net_exponent(&x));
    if args.json {
        print(out, &format!("{}\n", serde_json::to_string_pretty(&eq.to_json()).expect("json")))?;
    } else {
        let ks: Vec<String> = eq.blocks.iter().map(|(k, _)| k.to_string()).collect();
        let gs: Vec<String> = eq.blocks.iter().map(|(_, g)| g.to_string()).collect();
        let mut s = String::new();
        let _ = writeln!(s, "lhs: {}", eq.lhs);
        let _ = writeln!(s, "rhs: {}", eq.rhs);
        let _ = writeln!(s, "l: {}", eq.l());
        let _ = writeln!(s, "k_i: {}", ks.join(" "));
        let _ = writeln!(s, "g_i: {}", gs.join(" "));
        let _ = writeln!(s, "k: {}", eq.k);
        let _ = writeln!(s, "m: {}", eq.m);
        let _ = writeln!(s, "net x exponent: lhs {net_l}, rhs {net_r}");
        print(out, &s)?;
    }
    let round_trips = eq.lhs.to_string().parse::<Word>().is_ok_and(|w| w == eq.lhs);
    let ok = net_l == 8 && net_r == 2 && eq.m == -6 && eq.letters_allowed() && round_trips;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// Line chart of word length against `log₂ n`.
pub fn render_svg(rows: &[DistortionRow]) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let xs: Vec<f64> = rows.iter().map(|r| r.log2_n).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.word_len as f64).collect();
    let (x_min, x_max) = min_max(&xs);
    let (_, y_max) = min_max(&ys);
    let sx = |x: f64| pad + (x - x_min) / (x_max - x_min).max(1e-9) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - y / y_max.max(1.0) * (h - 2.0 * pad);
    let points: Vec<String> = xs.iter().zip(&ys).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<line x1="{pad}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#, y0 = h - pad, x1 = w - pad);
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{y0}" stroke="black"/>"#, y0 = h - pad);
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, points.join(" "));
    for (r, p) in rows.iter().zip(&points) {
        let (px, py) = p.split_once(',').unwrap();
        let _ = writeln!(s, r#"<circle cx="{px}" cy="{py}" r="3" fill="steelblue"/>"#);
        let _ = writeln!(s, r#"<text x="{px}" y="{py}" dy="-8" font-size="11" text-anchor="middle">n={}</text>"#, r.n);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">log2(n)</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {})">word length</text>"#,
        h / 2.0,
        h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
