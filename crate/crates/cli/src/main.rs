use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ribbonlab::algebra::rational;
use ribbonlab::algebra::{LaurentPoly, Rational};
use ribbonlab::bundles::{extension_classes, picard_ledger, picard_ledger_for, pullback_line_bundle, BundleCocycle};
use ribbonlab::cech::{CohClass, Cover};
use ribbonlab::multischeme::{
    derivation_cocycle, double_class, extend_scheme, ideal_extensions, make_double, obstruction_difference,
    parse_pair_map, trivial_scheme, DerivationCochain, MultiScheme,
};
use ribbonlab::random::DEFAULT_SEED;
use ribbonlab::surface::{
    kunneth_dims, k3_classify, moduli_fiber_rank, nonbanal_predicates, tangent_h1_dims, CurveProfile, EtaPair,
};
use ribbonlab::{selftest, Error};

#[derive(Parser)]
#[command(name = "ribbonlab", version, about = "Exact calculus for primitive multiple schemes over P1")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the cocycle relations of a scheme or bundle file.
    Validate { file: PathBuf },
    /// Emit the trivial scheme of multiplicity n.
    Trivial {
        #[arg(long, allow_hyphen_values = true)]
        ldeg: i64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        charts: usize,
    },
    /// Emit the line bundle with transitions x^d on a scheme.
    Pullback {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: i64,
    },
    /// Class in H¹(T⊗L) of a double built from a derivation cochain.
    ClassifyDouble {
        #[arg(long, allow_hyphen_values = true)]
        ldeg: i64,
        #[arg(long)]
        d_cochain: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        charts: usize,
    },
    /// Extend a scheme by one along the ideal extension with the given class.
    Extend {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        ideal_class: String,
    },
    /// Change of the extension obstruction when the ideal moves by η.
    ObstructDiff {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        eta: String,
    },
    PicardLedger {
        #[arg(long, allow_hyphen_values = true)]
        ldeg: i64,
        #[arg(long)]
        nmax: usize,
        /// Print every level's torsor instead of the bare array.
        #[arg(long)]
        detail: bool,
    },
    /// Extension torsor of a line bundle on X_n over X_{n+1}.
    ExtClasses {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
    K3 {
        #[arg(long, allow_hyphen_values = true)]
        eta1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eta4: Option<String>,
        #[arg(long)]
        gc: u32,
        #[arg(long)]
        gd: u32,
        /// η₁/η₄ is irrational; η₁ and η₄ are then not given.
        #[arg(long, conflicts_with_all = ["eta1", "eta4"])]
        irrational: bool,
    },
    Kunneth {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        lc: String,
        #[arg(long)]
        ld: String,
    },
    Predicates {
        #[arg(long)]
        g: u32,
        #[arg(long, allow_hyphen_values = true)]
        degl: i64,
        #[arg(long)]
        hyperelliptic: bool,
        #[arg(long)]
        canonical: bool,
        /// Also report the fiber rank of the moduli map for this rank.
        #[arg(long)]
        rank: Option<u32>,
    },
    /// Run the seeded property corpus.
    Selftest {
        #[arg(long, env = "RIBBONLAB_SEED")]
        seed: Option<u64>,
        /// Divide every case count by this factor.
        #[arg(long, default_value_t = 1)]
        divisor: usize,
    },
}

enum Failure {
    /// The input parsed but a checked relation fails.
    Invalid(String, String),
    Malformed(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        match e {
            Error::NotCocycle(_)
            | Error::CocycleViolation { .. }
            | Error::InvalidAuto(_)
            | Error::NotUnit(_)
            | Error::NotRegular { .. }
            | Error::Profile(_) => Failure::Invalid(kind, e.to_string()),
            _ => Failure::Malformed(kind, e.to_string()),
        }
    }
}

fn malformed(msg: impl Into<String>) -> Failure {
    Failure::Malformed("Parse".into(), msg.into())
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn read_scheme(path: &Path) -> Result<MultiScheme, Failure> {
    serde_json::from_value(read_json(path)?).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

/// Bundle files may name their scheme by a path relative to the file.
fn read_bundle(path: &Path) -> Result<BundleCocycle, Failure> {
    let v = read_json(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolve = |r: &str| -> ribbonlab::Result<MultiScheme> {
        let p = dir.join(r);
        let text = std::fs::read_to_string(&p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
    };
    Ok(BundleCocycle::from_json(v, resolve)?)
}

fn parse_vector(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| rational::parse(t).map_err(Failure::from))
        .collect()
}

fn with_criterion(v: impl Serialize, criterion: &str) -> Value {
    let mut v = serde_json::to_value(v).expect("reports serialize");
    if let Value::Object(m) = &mut v {
        m.insert("criterion".into(), json!(criterion));
    }
    v
}

fn cover(charts: usize) -> Result<Cover, Failure> {
    Ok(Cover::from_count(charts)?)
}

#[derive(Deserialize)]
struct DerivationFile {
    #[serde(default = "three")]
    charts: usize,
    values: BTreeMap<String, LaurentPoly>,
}

fn three() -> usize {
    3
}

fn derivation_from_file(path: &Path, ldeg: i64) -> Result<DerivationCochain, Failure> {
    let f: DerivationFile = serde_json::from_value(read_json(path)?).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let c = cover(f.charts)?;
    let mut vals = parse_pair_map(f.values, c)?;
    if vals.keys().any(|p| p.0 > p.1) {
        return Err(malformed("derivation values are given on increasing overlaps"));
    }
    let get = |vals: &mut BTreeMap<(usize, usize), LaurentPoly>, p| vals.remove(&p).unwrap_or_default();
    match (c, vals.contains_key(&(0, 2))) {
        (Cover::Three, true) => Ok(DerivationCochain::new(c, ldeg, vals)?),
        _ => {
            let g01 = get(&mut vals, (0, 1));
            let g12 = get(&mut vals, (1, 2));
            Ok(derivation_cocycle(c, ldeg, g01, g12))
        }
    }
}

#[derive(Deserialize)]
struct ProfilesFile {
    #[serde(rename = "C")]
    c: CurveProfile,
    #[serde(rename = "D")]
    d: CurveProfile,
}

fn normalize(p: CurveProfile) -> Result<CurveProfile, Failure> {
    Ok(CurveProfile::new(p.genus, p.hyperelliptic, p.bundles)?)
}

fn run(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Validate { file } => {
            let v = read_json(&file)?;
            if v.get("transitions").is_some() {
                let e = read_bundle(&file)?;
                let report = e.validate();
                let ok = report.valid;
                Ok((with_criterion(json!({"kind": "bundle", "rank": e.rank(), "n": e.n(), "report": report}), "θ_ik = θ_ij·δ*_ij(θ_jk) and invertible reductions"), ok))
            } else if v.get("gluing").is_some() {
                let x = read_scheme(&file)?;
                let report = x.validate();
                let ok = report.valid;
                Ok((with_criterion(json!({"kind": "scheme", "n": x.n(), "l_degree": x.l_degree(), "report": report}), "δ*_ik = δ*_ij∘δ*_jk with δ*_ij(t) = α_ij·t"), ok))
            } else {
                Err(malformed("neither a scheme (\"gluing\") nor a bundle (\"transitions\") file"))
            }
        }
        Cmd::Trivial { ldeg, n, charts } => Ok((serde_json::to_value(trivial_scheme(ldeg, n, cover(charts)?)?).expect("serializable"), true)),
        Cmd::Pullback { scheme, degree } => {
            let x = read_scheme(&scheme)?;
            Ok((serde_json::to_value(pullback_line_bundle(&x, degree)?).expect("serializable"), true))
        }
        Cmd::ClassifyDouble { ldeg, d_cochain, charts } => {
            let d = match d_cochain {
                Some(p) => derivation_from_file(&p, ldeg)?,
                None => DerivationCochain::zero(cover(charts)?, ldeg),
            };
            let x = make_double(ldeg, &d)?;
            let z = double_class(&x)?;
            Ok((
                with_criterion(
                    json!({
                        "l_degree": ldeg,
                        "class": z.class,
                        "h1_dim": z.class.dim(),
                        "trivial": z.class.is_zero(),
                        "scheme": x,
                    }),
                    "doubles with reduction X and ideal L correspond to H¹(T⊗L) up to nonzero scalars",
                ),
                true,
            ))
        }
        Cmd::Extend { scheme, ideal_class } => {
            let x = read_scheme(&scheme)?;
            let ext = ideal_extensions(&x)?;
            let class = CohClass::from_coeffs(1, ext.param_degree(), parse_vector(&ideal_class)?)?;
            let big = extend_scheme(&x, &ext.from_class(&class)?)?;
            Ok((serde_json::to_value(big).expect("serializable"), true))
        }
        Cmd::ObstructDiff { scheme, eta } => {
            let x = read_scheme(&scheme)?;
            let degree = x.l_degree() * (x.n() as i64 - 1);
            let class = CohClass::from_coeffs(1, degree, parse_vector(&eta)?)?;
            let od = obstruction_difference(&x, &class)?;
            Ok((
                with_criterion(
                    json!({"eta": class, "cup": od.cup, "class": od.class, "witness": od.witness}),
                    "moving the ideal extension by η moves the obstruction by ζ∪η",
                ),
                true,
            ))
        }
        Cmd::PicardLedger { ldeg, nmax, detail } => {
            if detail {
                if nmax < 2 {
                    return Err(Error::Range(format!("the ledger needs n_max ≥ 2, got {nmax}")).into());
                }
                let x = trivial_scheme(ldeg, nmax, Cover::Three)?;
                let levels = picard_ledger_for(&x)?;
                Ok((
                    with_criterion(
                        json!({"l_degree": ldeg, "ledger": levels.iter().map(|t| t.quotient_dim).collect::<Vec<_>>(), "levels": levels}),
                        "fiber of Pic(X_{k+1}) → Pic(X_k) is H¹(L^k) modulo the image of δ⁰",
                    ),
                    true,
                ))
            } else {
                Ok((json!(picard_ledger(ldeg, nmax)?), true))
            }
        }
        Cmd::ExtClasses { bundle, scheme } => {
            let d = read_bundle(&bundle)?;
            let big = read_scheme(&scheme)?;
            let t = extension_classes(&d, &big)?;
            Ok((with_criterion(t, "extensions differing by β are isomorphic iff β lies in the image of δ⁰"), true))
        }
        Cmd::K3 { eta1, eta4, gc, gd, irrational } => {
            let pair = if irrational {
                EtaPair::IrrationalRatio
            } else {
                let (Some(a), Some(b)) = (eta1, eta4) else {
                    return Err(malformed("give --eta1 and --eta4, or --irrational"));
                };
                EtaPair::Rational(rational::parse(&a)?, rational::parse(&b)?)
            };
            let r = k3_classify(&pair, gc, gd)?;
            Ok((
                with_criterion(
                    r,
                    "O(a,b) extends iff η₁a + η₄b = 0; projective iff η = 0 or η₁η₄ < 0 with rational ratio; X₃ iff (g_C−1)η₁ + (g_D−1)η₄ = 0",
                ),
                true,
            ))
        }
        Cmd::Kunneth { profiles, lc, ld } => {
            let f: ProfilesFile = serde_json::from_value(read_json(&profiles)?).map_err(|e| malformed(format!("{}: {e}", profiles.display())))?;
            let (pc, pd) = (normalize(f.c)?, normalize(f.d)?);
            let [h0, h1, h2] = kunneth_dims(&pc, &pd, &lc, &ld)?;
            let tangent = tangent_h1_dims(&pc, &pd, &lc, &ld)?;
            Ok((
                with_criterion(json!({"h0": h0, "h1": h1, "h2": h2, "tangent_h1": tangent}), "Künneth: H^k(L_C⊠L_D) = ⊕ H^i(L_C)⊗H^j(L_D)"),
                true,
            ))
        }
        Cmd::Predicates { g, degl, hyperelliptic, canonical, rank } => {
            let p = nonbanal_predicates(g, degl, hyperelliptic, canonical)?;
            let mut v = with_criterion(
                p,
                "Pic non-banal ⇔ (X not hyperelliptic ∧ deg L ≤ 2−2g) ∨ L ≅ ω_X; moduli non-banal ⇔ X not hyperelliptic ∧ deg L ≤ 2−2g",
            );
            if let Some(r) = rank {
                v["moduli_fiber_rank"] = json!(moduli_fiber_rank(r, g, degl)?);
                v["fiber_rank_formula"] = json!("r²(deg L + g − 1)");
            }
            Ok((v, true))
        }
        Cmd::Selftest { seed, divisor } => {
            let report = selftest::run(seed.unwrap_or(DEFAULT_SEED), divisor);
            let ok = report.passed;
            Ok((with_criterion(report, "acceptance corpus"), ok))
        }
    }
}

fn render_text(v: &Value) -> String {
    match v {
        Value::Object(m) => m
            .iter()
            .map(|(k, x)| match x {
                Value::Object(_) | Value::Array(_) => format!("{k}: {x}"),
                Value::String(s) => format!("{k}: {s}"),
                _ => format!("{k}: {x}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}

fn emit_error(kind: &str, message: &str) {
    eprintln!("{}", json!({"error": kind, "message": message}));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error("Usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok((v, ok)) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&v).expect("serializable"),
                Format::Text => render_text(&v),
            };
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Invalid(kind, msg)) => {
            emit_error(&kind, &msg);
            ExitCode::from(1)
        }
        Err(Failure::Malformed(kind, msg)) => {
            emit_error(&kind, &msg);
            ExitCode::from(2)
        }
    }
}
