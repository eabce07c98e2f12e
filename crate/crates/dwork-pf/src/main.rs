//! Command-line front end: family inspection, operator construction,
//! oracle verification, deformation and Frobenius computation.
//!
//! All results go to stdout as JSON (or `--format text` for humans);
//! diagnostics go to stderr. Exit codes: 0 success/verified,
//! 1 verification-false, 2 usage or domain error, 3 resource cap exceeded,
//! 4 unsupported case.

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dwork_pf::deformation::{
    connection_series, deformation_matrix_any, frobenius_for_component,
    horizontality_residual, SeriesMatrix,
};
use dwork_pf::error::{DeformationError, FamilyError};
use dwork_pf::family::{CharVector, FamilyData};
use dwork_pf::operators::{
    build_hyp_prime, build_p_prime, reduce_p, reduced_parts, DiffOperator, Var,
};
use dwork_pf::oracle::{verify_annihilation, JacobianBasisCache};
use dwork_pf::poly::Poly;
use dwork_pf::rational::{rat_int, Rational};
use dwork_pf::schema;

const EXIT_OK: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dwork-pf",
    about = "Picard-Fuchs operators, cohomological verification and \
             p-adic deformation matrices for generalized Dwork families",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coords {
    Lambda,
    T,
}

#[derive(Args)]
struct FamilyArgs {
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Degree of the defining equation.
    #[arg(long)]
    d: u64,
    /// Comma-separated weights w_1,...,w_n.
    #[arg(long, value_delimiter = ',')]
    w: Vec<u64>,
}

impl FamilyArgs {
    fn build(&self) -> Result<FamilyData, FamilyError> {
        FamilyData::new(self.n, self.d, self.w.clone())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a family: derived data and component census.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Worker threads for family-wide commands.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Emit the annihilating operator of one component.
    Operator {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated character vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<i64>,
        /// Coordinate: `lambda` for P(V, W), `t` for the hypergeometric
        /// parameters on t = λ^{-d}.
        #[arg(long, value_enum, default_value = "lambda")]
        coords: Coords,
        /// Also emit the unreduced operator (P' or the uncancelled
        /// parameters).
        #[arg(long)]
        raw: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Verify annihilation of P' and P with the reduction oracle.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Character vector; omit to verify every component class.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<i64>>,
        /// Test hook: bump one operator parameter by +1 before verifying.
        #[arg(long)]
        mutate: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Deformation matrix A(λ) of one component.
    Deformation {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<i64>,
        /// Series truncation order.
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Frobenius matrix F(λ) = A(λ)^{-1} F(0) A(λ^p) of one component.
    Frobenius {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<i64>,
        /// The prime p (must not divide d or any weight).
        #[arg(long)]
        p: u64,
        /// Report entries mod p^N as well.
        #[arg(long)]
        prec: Option<u32>,
        /// Path to F(0): JSON r×r array of "num/den" strings.
        #[arg(long)]
        f0: String,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Family {
            family,
            format,
            jobs,
        } => cmd_family(&family, format, jobs),
        Command::Operator {
            family,
            v,
            coords,
            raw,
            format,
        } => cmd_operator(&family, &v, coords, raw, format),
        Command::Verify {
            family,
            v,
            mutate,
            format,
            jobs,
        } => cmd_verify(&family, v.as_deref(), mutate, format, jobs),
        Command::Deformation {
            family,
            v,
            order,
            format,
        } => cmd_deformation(&family, &v, order, format),
        Command::Frobenius {
            family,
            v,
            p,
            prec,
            f0,
            order,
            format,
        } => cmd_frobenius(&family, &v, p, prec, &f0, order, format),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: &str) -> u8 {
    eprintln!("error: {message}");
    code
}

fn parse_component(family: &FamilyData, v: &[i64]) -> Result<CharVector, u8> {
    family
        .char_vector(v)
        .map_err(|e| fail(EXIT_USAGE, &e.to_string()))
}

fn require_totally_nonzero(family: &FamilyData, cv: &CharVector) -> Result<(), u8> {
    if cv.is_totally_nonzero() {
        return Ok(());
    }
    // Rank is still defined for degenerate classes; report it on the way
    // out.
    Err(fail(
        EXIT_USAGE,
        &format!(
            "character vector {} is not totally nonzero (rank of its class: {})",
            schema::char_vector_string(cv),
            family.rank(cv)
        ),
    ))
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text => println!("{}", text()),
    }
}

fn cmd_family(args: &FamilyArgs, format: Format, jobs: usize) -> u8 {
    let family = match args.build() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, &e.to_string()),
    };
    let classes = family.symmetry_classes();
    let describe = |(cv, class_size): &(CharVector, usize)| -> Result<Value, FamilyError> {
        let rank = family.rank(cv);
        let i_set = family.index_set_i(cv)?;
        let j_set = family.index_set_j(cv)?;
        let (exponents, _) = reduced_parts(&family, cv)?;
        // The cyclic derivative basis works exactly when the solution
        // exponents are an initial segment.
        let cyclic = exponents.iter().enumerate().all(|(i, &k)| k == i as u64);
        Ok(json!({
            "v": schema::char_vector_string(cv),
            "deg": cv.deg(),
            "rank": rank,
            "i_set": i_set,
            "j_set": j_set,
            "exponents": exponents,
            "cyclic_basis_ok": cyclic,
            "class_size": class_size,
        }))
    };
    let reps: Vec<Value> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            classes
                .par_iter()
                .map(|c| describe(c).expect("representatives are totally nonzero"))
                .collect()
        })
    } else {
        classes
            .iter()
            .map(|c| describe(c).expect("representatives are totally nonzero"))
            .collect()
    };
    let value = json!({
        "family": schema::family_value(&family),
        "representatives": reps,
        "orbit_count": family.representatives().len(),
    });
    emit(format, &value, || {
        let mut out = format!(
            "family n={} d={} W=({}), d_W={}, b=({})\n",
            family.n(),
            family.d(),
            family
                .weights()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            family.d_w(),
            family
                .bezout()
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        for rep in &value["representatives"].as_array().unwrap()[..] {
            out.push_str(&format!(
                "  V = ({}): rank {}, I = {}, J = {}, cyclic basis {} (×{})\n",
                rep["v"].as_str().unwrap(),
                rep["rank"],
                rep["i_set"],
                rep["j_set"],
                if rep["cyclic_basis_ok"].as_bool().unwrap() {
                    "ok"
                } else {
                    "fails"
                },
                rep["class_size"],
            ));
        }
        out.trim_end().to_string()
    });
    EXIT_OK
}

fn cmd_operator(
    args: &FamilyArgs,
    v: &[i64],
    coords: Coords,
    raw: bool,
    format: Format,
) -> u8 {
    let family = match args.build() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, &e.to_string()),
    };
    let cv = match parse_component(&family, v) {
        Ok(cv) => cv,
        Err(code) => return code,
    };
    if let Err(code) = require_totally_nonzero(&family, &cv) {
        return code;
    }
    let mut fields: Vec<(&str, Value)> = vec![
        ("family", schema::family_value(&family)),
        ("v", Value::String(schema::char_vector_string(&cv))),
        ("rank", json!(family.rank(&cv))),
    ];
    let mut text = String::new();
    match coords {
        Coords::Lambda => {
            let p = reduce_p(&family, &cv).expect("totally nonzero");
            text.push_str(&format!("P(V, W) = {p}"));
            fields.push(("operator", schema::operator_value(&p)));
            if raw {
                let p_prime = build_p_prime(&family, &cv).expect("totally nonzero");
                text.push_str(&format!("\nP'(V, W) = {p_prime}"));
                fields.push(("raw_operator", schema::operator_value(&p_prime)));
            }
        }
        Coords::T => {
            let hyp = build_hyp_prime(&family, &cv).expect("totally nonzero");
            let cancelled = hyp.cancel();
            text.push_str(&format!("Hyp(V, W, b) = {cancelled}"));
            fields.push(("operator", schema::hyp_value(&cancelled)));
            if raw {
                text.push_str(&format!("\nHyp'(V, W, b) = {hyp}"));
                fields.push(("raw_operator", schema::hyp_value(&hyp)));
            }
        }
    }
    let value = schema::object(fields);
    emit(format, &value, || text);
    EXIT_OK
}

/// +1 on the first right parameter: turns P into a non-annihilating
/// operator while keeping its shape.
fn mutate_operator(family: &FamilyData, cv: &CharVector) -> DiffOperator {
    let (left, mut right) = reduced_parts(family, cv).expect("totally nonzero");
    right[0] = &right[0] + rat_int(1);
    let left: Vec<Rational> = left.into_iter().map(|k| rat_int(k as i64)).collect();
    let lhs = DiffOperator::from_left_roots(Var::Lambda, &left);
    let rhs = DiffOperator::from_left_roots(
        Var::Lambda,
        &right.iter().map(|a| -a).collect::<Vec<_>>(),
    );
    lhs.sub(&rhs.mul_poly_left(&Poly::monomial(Rational::from_integer(1.into()), family.d() as usize)))
}

fn cmd_verify(
    args: &FamilyArgs,
    v: Option<&[i64]>,
    mutate: bool,
    format: Format,
    jobs: usize,
) -> u8 {
    let family = match args.build() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, &e.to_string()),
    };
    let components: Vec<CharVector> = match v {
        Some(v) => {
            let cv = match parse_component(&family, v) {
                Ok(cv) => cv,
                Err(code) => return code,
            };
            if let Err(code) = require_totally_nonzero(&family, &cv) {
                return code;
            }
            vec![cv]
        }
        None => family
            .symmetry_classes()
            .into_iter()
            .map(|(cv, _)| cv)
            .collect(),
    };
    let run_component = |cv: &CharVector| -> Result<Vec<Value>, String> {
        let cache = JacobianBasisCache::new(&family);
        let mut ops: Vec<(&str, DiffOperator)> = vec![
            ("P'", build_p_prime(&family, cv).expect("totally nonzero")),
            ("P", reduce_p(&family, cv).expect("totally nonzero")),
        ];
        if mutate {
            ops.push(("P+1", mutate_operator(&family, cv)));
        }
        let mut records = Vec::new();
        for (name, op) in ops {
            let start = Instant::now();
            let verdict =
                verify_annihilation(&cache, cv, &op).map_err(|e| e.to_string())?;
            records.push(json!({
                "family": schema::family_value(&family),
                "v": schema::char_vector_string(cv),
                "operator": name,
                "annihilates": verdict.annihilates,
                "top_pole_order": verdict.top_pole_order,
                "wall_time_ms": start.elapsed().as_millis() as u64,
            }));
        }
        Ok(records)
    };
    let results: Result<Vec<Vec<Value>>, String> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| components.par_iter().map(run_component).collect())
    } else {
        components.iter().map(run_component).collect()
    };
    let records: Vec<Value> = match results {
        Ok(r) => r.into_iter().flatten().collect(),
        Err(e) if e.contains("resource cap") => return fail(EXIT_RESOURCE, &e),
        Err(e) => return fail(EXIT_UNSUPPORTED, &e),
    };
    // Exit 0 iff every ran verification came out true; the --mutate hook
    // injects an operator that must fail, flipping the exit to 1.
    let verified = records.iter().all(|r| r["annihilates"] == true);
    let value = json!({
        "results": records,
        "verified": verified,
    });
    emit(format, &value, || {
        value["results"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                format!(
                    "V = ({}) {}: {} (top pole {}, {} ms)",
                    r["v"].as_str().unwrap(),
                    r["operator"].as_str().unwrap(),
                    if r["annihilates"] == true {
                        "annihilates"
                    } else {
                        "does NOT annihilate"
                    },
                    r["top_pole_order"],
                    r["wall_time_ms"],
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    });
    if verified {
        EXIT_OK
    } else {
        EXIT_FALSE
    }
}

fn deformation_exit(e: &DeformationError) -> u8 {
    match e {
        DeformationError::DegenerateParameter { .. }
        | DeformationError::UnsupportedMonodromy(_)
        | DeformationError::CyclicBasisFails { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_USAGE,
    }
}

fn cmd_deformation(args: &FamilyArgs, v: &[i64], order: usize, format: Format) -> u8 {
    let family = match args.build() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, &e.to_string()),
    };
    let cv = match parse_component(&family, v) {
        Ok(cv) => cv,
        Err(code) => return code,
    };
    if let Err(code) = require_totally_nonzero(&family, &cv) {
        return code;
    }
    let rank = family.rank(&cv);
    if order < rank {
        return fail(
            EXIT_USAGE,
            &format!("order {order} is below the rank {rank}"),
        );
    }
    let (a, change) = match deformation_matrix_any(&family, &cv, order) {
        Ok(x) => x,
        Err(e) => return fail(deformation_exit(&e), &e.to_string()),
    };
    let (exponents, _) = reduced_parts(&family, &cv).expect("totally nonzero");
    let value = json!({
        "family": schema::family_value(&family),
        "v": schema::char_vector_string(&cv),
        "order": order,
        "rank": rank,
        "exponents": exponents,
        "a": schema::series_matrix_value(&a),
        "basis_change": change
            .as_ref()
            .map(schema::basis_change_value)
            .unwrap_or(Value::Null),
    });
    emit(format, &value, || {
        let mut out = format!(
            "A(λ) for V = ({}), order {order}:\n",
            schema::char_vector_string(&cv)
        );
        for i in 0..a.size() {
            for j in 0..a.size() {
                out.push_str(&format!("  A[{i}][{j}] = {}\n", a.entry(i, j)));
            }
        }
        if change.is_some() {
            out.push_str("  (canonical-extension basis correction applied)\n");
        }
        out.trim_end().to_string()
    });
    EXIT_OK
}

fn cmd_frobenius(
    args: &FamilyArgs,
    v: &[i64],
    p: u64,
    prec: Option<u32>,
    f0_path: &str,
    order: usize,
    format: Format,
) -> u8 {
    let family = match args.build() {
        Ok(f) => f,
        Err(e) => return fail(EXIT_USAGE, &e.to_string()),
    };
    let cv = match parse_component(&family, v) {
        Ok(cv) => cv,
        Err(code) => return code,
    };
    if let Err(code) = require_totally_nonzero(&family, &cv) {
        return code;
    }
    let rank = family.rank(&cv);
    if order < rank {
        return fail(
            EXIT_USAGE,
            &format!("order {order} is below the rank {rank}"),
        );
    }
    let raw = match std::fs::read_to_string(f0_path) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_USAGE, &format!("cannot read {f0_path}: {e}")),
    };
    let parsed: Value = match serde_json::from_str(&raw) {
        Ok(v) => v,
        Err(e) => return fail(EXIT_USAGE, &format!("invalid JSON in {f0_path}: {e}")),
    };
    let f0 = match schema::parse_rational_matrix(&parsed) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_USAGE, &format!("invalid F(0): {e}")),
    };
    if f0.len() != rank {
        return fail(
            EXIT_USAGE,
            &format!("F(0) is {}×{} but the component has rank {rank}", f0.len(), f0.len()),
        );
    }
    let out = match frobenius_for_component(&family, &cv, &f0, p, order) {
        Ok(x) => x,
        Err(e @ DeformationError::BadPrime { .. }) => {
            return fail(EXIT_USAGE, &e.to_string())
        }
        Err(e) => return fail(deformation_exit(&e), &e.to_string()),
    };
    // Exactness check: the horizontality equation must hold identically to
    // the truncation order.
    let residual_zero = {
        let c_order = (order.saturating_sub(1)).max(1);
        let c1_order = c_order.div_ceil(p as usize).max(1);
        let c_v = connection_series(&family, &cv, out.correction_v.as_ref(), c_order);
        let c_v1 =
            connection_series(&family, &out.v1, out.correction_v1.as_ref(), c1_order);
        match (c_v, c_v1) {
            (Ok(c_v), Ok(c_v1)) => {
                let residual = horizontality_residual(&out.result.f, &c_v, &c_v1, p);
                residual == SeriesMatrix::zero(residual.size(), residual.order())
            }
            _ => false,
        }
    };
    let mut value = schema::frobenius_value(&out.result, residual_zero);
    {
        let map = value.as_object_mut().unwrap();
        map.insert("family".into(), schema::family_value(&family));
        map.insert(
            "v".into(),
            Value::String(schema::char_vector_string(&cv)),
        );
        map.insert(
            "v1".into(),
            Value::String(schema::char_vector_string(&out.v1)),
        );
        if let Some(n) = prec {
            match out.result.reduce_mod(n) {
                Ok(view) => {
                    map.insert("mod".into(), schema::padic_view_value(&view));
                }
                Err(e) => return fail(EXIT_USAGE, &e.to_string()),
            }
        }
    }
    emit(format, &value, || {
        format!(
            "F(λ) for V = ({}), p = {p}, order {order}: residual {}",
            schema::char_vector_string(&cv),
            if residual_zero { "zero to order" } else { "NONZERO" }
        )
    });
    EXIT_OK
}
