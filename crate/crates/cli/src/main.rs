//! `mac`: homology of moment-angle complexes, Whitehead products and Taylor
//! cycles from the command line.
//!
//! Every verb prints one report. JSON reports have the fields `verb`,
//! `inputs`, `results`, `engine_version`, `generator_order` and, with
//! `--timing`, `timing_ms`, in that order.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use mac_core::complexes::{substitution_missing_faces, Face, SimplicialComplex, Vertex};
use mac_core::moment_angle::{hochster_table, is_nonzero_class, ranks, reduced, zk_homology};
use mac_core::taylor::{
    nested_taylor_cycle, taylor_block, taylor_face_complex, verify_taylor_is_resolution, TaylorFaceComplex,
};
use mac_core::text::{parse_complex, parse_whitehead};
use mac_core::whitehead::{nested_shape_status, realises_sufficient, shifted_wedge_basis, single_product_status};
use mac_core::zigzag::{classes_equal_up_to_sign, koszul_to_taylor};
use mac_core::{CellChain, Error, HomologyGroup, Int, MonomialIdeal, WhiteheadExpr, ENGINE_VERSION};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Verb {
    Homology,
    Mf,
    Subst,
    DeltaW,
    Hurewicz,
    Status,
    Realises,
    Taylor,
    TaylorCycle,
    Zigzag,
    Hochster,
    WedgeBasis,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "mac", version, about = "Moment-angle complexes, Whitehead products and Taylor cycles")]
struct Cli {
    verb: Verb,
    /// Complex: an expression such as `bd(simplex(1,2,3))`, a path to a JSON
    /// file, or inline JSON `{"m": .., "facets": [..]}`.
    #[arg(long)]
    complex: Option<String>,
    /// Whitehead bracket such as `[[1,2,3],4,5]`.
    #[arg(long)]
    w: Option<String>,
    /// Comma-separated vertex subset.
    #[arg(long)]
    subset: Option<String>,
    /// Part for `subst`, once per vertex of the outer complex.
    #[arg(long = "part")]
    parts: Vec<String>,
    /// Cellular chain for `zigzag`, e.g. `D1S2 + S1D2`.
    #[arg(long)]
    chain: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    max_vertices: usize,
    /// Include wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeBound { .. } => 2,
            Error::Inconsistent(_) | Error::SquareNonZero(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Results payload, its text rendering, and whether a verification failed.
struct Output {
    results: Value,
    text: Vec<String>,
    generator_order: Vec<Face>,
    failed: bool,
}

impl Output {
    fn new(results: Value, text: Vec<String>) -> Self {
        Output {
            results,
            text,
            generator_order: Vec::new(),
            failed: false,
        }
    }

    fn order(mut self, k: &SimplicialComplex) -> Self {
        self.generator_order = k.missing_faces();
        self
    }
}

#[derive(Serialize)]
struct Report<'a> {
    verb: Verb,
    inputs: BTreeMap<&'static str, Value>,
    results: &'a Value,
    engine_version: &'static str,
    generator_order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<f64>,
}

fn load_complex(text: &str) -> Outcome<SimplicialComplex> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| usage(format!("complex JSON: {e}")))?;
        return Ok(SimplicialComplex::from_json(&v)?);
    }
    if trimmed.ends_with(".json") || Path::new(trimmed).is_file() {
        let raw = std::fs::read_to_string(trimmed).map_err(|e| usage(format!("cannot read {trimmed}: {e}")))?;
        let v: Value = serde_json::from_str(&raw).map_err(|e| usage(format!("{trimmed}: {e}")))?;
        return Ok(SimplicialComplex::from_json(&v)?);
    }
    Ok(parse_complex(trimmed)?)
}

fn parse_subset(text: &str) -> Outcome<Face> {
    let vs = text
        .split(',')
        .map(|t| t.trim().parse::<Vertex>().map_err(|_| usage(format!("bad vertex `{t}` in --subset"))))
        .collect::<Outcome<Vec<Vertex>>>()?;
    Ok(Face::new(vs)?)
}

fn groups_json(t: &BTreeMap<i64, HomologyGroup<Int>>) -> Value {
    let m: BTreeMap<String, &HomologyGroup<Int>> =
        t.iter().filter(|(_, g)| !g.is_zero()).map(|(d, g)| (d.to_string(), g)).collect();
    json!(m)
}

fn group_text(g: &HomologyGroup<Int>) -> String {
    let mut parts = Vec::new();
    match g.rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(g.torsion.iter().map(|t| format!("Z/{t}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn table_text(t: &BTreeMap<i64, HomologyGroup<Int>>) -> Vec<String> {
    t.iter()
        .filter(|(_, g)| !g.is_zero())
        .map(|(d, g)| format!("H_{d} = {}", group_text(g)))
        .collect()
}

fn faces_text(fs: &[Face]) -> String {
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ")
}

struct Context<'a> {
    cli: &'a Cli,
    complex: Option<SimplicialComplex>,
    w: Option<WhiteheadExpr>,
    subset: Option<Face>,
}

impl Context<'_> {
    fn complex(&self) -> Outcome<&SimplicialComplex> {
        self.complex.as_ref().ok_or_else(|| usage(format!("{:?} needs --complex", self.cli.verb)))
    }

    fn w(&self) -> Outcome<&WhiteheadExpr> {
        self.w.as_ref().ok_or_else(|| usage(format!("{:?} needs --w", self.cli.verb)))
    }
}

fn check_arity(cli: &Cli) -> Outcome<()> {
    let has = |o: &Option<String>| o.is_some();
    let need_complex = !matches!(cli.verb, Verb::DeltaW | Verb::Hurewicz);
    if need_complex && !has(&cli.complex) {
        return Err(usage("this verb needs --complex"));
    }
    let need_w = matches!(
        cli.verb,
        Verb::DeltaW | Verb::Hurewicz | Verb::Realises | Verb::TaylorCycle
    );
    if need_w && !has(&cli.w) {
        return Err(usage("this verb needs --w"));
    }
    match cli.verb {
        Verb::Status if has(&cli.w) == has(&cli.subset) => Err(usage("status needs exactly one of --w and --subset")),
        Verb::Zigzag if has(&cli.w) == has(&cli.chain) => Err(usage("zigzag needs exactly one of --w and --chain")),
        Verb::Subst if cli.parts.is_empty() => Err(usage("subst needs one --part per vertex")),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Outcome<Output> {
    check_arity(cli)?;
    let complex = cli.complex.as_deref().map(load_complex).transpose()?;
    if let Some(k) = &complex {
        if k.num_vertices() > cli.max_vertices {
            return Err(Failure {
                code: 2,
                message: format!(
                    "the complex has {} vertices, above the bound --max-vertices {}",
                    k.num_vertices(),
                    cli.max_vertices
                ),
            });
        }
    }
    let ctx = Context {
        cli,
        complex,
        w: cli.w.as_deref().map(parse_whitehead).transpose()?,
        subset: cli.subset.as_deref().map(parse_subset).transpose()?,
    };
    match cli.verb {
        Verb::Homology => homology(&ctx),
        Verb::Mf => mf(&ctx),
        Verb::Subst => subst(&ctx),
        Verb::DeltaW => delta_w(&ctx),
        Verb::Hurewicz => hurewicz(&ctx),
        Verb::Status => status(&ctx),
        Verb::Realises => realises(&ctx),
        Verb::Taylor => taylor(&ctx),
        Verb::TaylorCycle => taylor_cycle(&ctx),
        Verb::Zigzag => zigzag(&ctx),
        Verb::Hochster => hochster(&ctx),
        Verb::WedgeBasis => wedge_basis(&ctx),
        Verb::Verify => verify(&ctx),
    }
}

fn homology(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let h = zk_homology(k)?;
    let rk: BTreeMap<String, usize> =
        ranks(&h).into_iter().filter(|(_, r)| *r > 0).map(|(d, r)| (d.to_string(), r)).collect();
    let results = json!({ "homology": groups_json(&h), "ranks": rk });
    Ok(Output::new(results, table_text(&h)).order(k))
}

fn mf(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let mf = k.missing_faces();
    let text = vec![faces_text(&mf)];
    Ok(Output::new(json!({ "missing_faces": mf }), text).order(k))
}

fn subst(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let parts = ctx.cli.parts.iter().map(|p| load_complex(p)).collect::<Outcome<Vec<_>>>()?;
    let (sub, maps) = k.substitute_relabelled(&parts)?;
    let relabelled = parts
        .iter()
        .zip(&maps)
        .map(|(p, m)| p.relabel(m))
        .collect::<mac_core::Result<Vec<_>>>()?;
    let formula = substitution_missing_faces(k, &relabelled)?;
    let direct = sub.missing_faces();
    let mut out = Output::new(
        json!({
            "complex": sub,
            "missing_faces": direct,
            "formula_matches": formula == direct,
        }),
        vec![
            format!("facets: {}", faces_text(sub.facets())),
            format!("missing faces: {}", faces_text(&direct)),
        ],
    )
    .order(&sub);
    out.failed = formula != direct;
    Ok(out)
}

fn delta_w(ctx: &Context) -> Outcome<Output> {
    let w = ctx.w()?;
    let k = w.delta_w()?;
    let sphere = w.delta_w_sphere()?;
    let results = json!({
        "complex": k,
        "sphere": sphere,
        "missing_faces": k.missing_faces(),
        "dimension": w.dimension()?,
    });
    let text = vec![
        format!("facets: {}", faces_text(k.facets())),
        format!("missing faces: {}", faces_text(&k.missing_faces())),
        format!("dimension: {}", w.dimension()?),
    ];
    Ok(Output::new(results, text).order(&k))
}

fn hurewicz(ctx: &Context) -> Outcome<Output> {
    let w = ctx.w()?;
    let h = w.hurewicz_chain()?;
    let mut results = json!({ "chain": h, "degree": h.degree });
    let mut text = vec![h.to_string()];
    let mut out_k = None;
    if let Some(k) = &ctx.complex {
        let cycle = h.lies_in(k) && h.cellular_boundary().is_zero();
        let nonzero = if cycle { Some(is_nonzero_class(k, &h)?) } else { None };
        results["is_cycle_in_zk"] = json!(cycle);
        results["nonzero_class"] = json!(nonzero);
        text.push(format!("cycle in Z_K: {cycle}, nonzero class: {nonzero:?}"));
        out_k = Some(k);
    }
    let out = Output::new(results, text);
    Ok(match out_k {
        Some(k) => out.order(k),
        None => out,
    })
}

fn status(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let rep = match (&ctx.w, ctx.subset) {
        (Some(w), _) => nested_shape_status(k, w)?,
        (None, Some(s)) => single_product_status(k, s)?,
        (None, None) => unreachable!("arity checked"),
    };
    let text = vec![rep.status.to_string()];
    Ok(Output::new(json!(rep), text).order(k))
}

fn realises(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let rep = realises_sufficient(k, ctx.w()?)?;
    let text = vec![
        format!("defined: {:?}", rep.defined).to_lowercase(),
        format!("nontrivial: {:?}", rep.nontrivial).to_lowercase(),
        format!("criterion: {}", rep.criterion),
    ];
    Ok(Output::new(json!(rep), text).order(k))
}

fn taylor_summary(t: &TaylorFaceComplex) -> (Value, Vec<String>) {
    let top = t.generators().len();
    let index_ranks: Vec<usize> = (0..=top).map(|s| t.rank_in_index(s)).collect();
    let h = t.homology();
    let by_block: Vec<Value> = t
        .homology_by_block()
        .into_iter()
        .map(|((s, i), g)| json!({ "union": s, "index": i, "group": g }))
        .collect();
    let mut text = vec![format!("index ranks: {:?}", index_ranks)];
    text.extend(table_text(&h));
    (
        json!({ "index_ranks": index_ranks, "homology": groups_json(&h), "blocks": by_block }),
        text,
    )
}

fn taylor(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    if let Some(s) = ctx.subset {
        let mf = k.missing_faces();
        let block = taylor_block(&mf, s)?;
        let mut degrees = BTreeMap::new();
        let mut text = Vec::new();
        for d in block.degrees().collect::<Vec<_>>() {
            let words: Vec<String> = block.basis(d).iter().map(|w| w.written().0).collect();
            text.push(format!("degree {d}: {}", words.join(" ")));
            degrees.insert(d.to_string(), words);
        }
        let h = block.homology_all();
        text.extend(table_text(&h));
        let results = json!({ "union": s, "words": degrees, "homology": groups_json(&h) });
        return Ok(Output::new(results, text).order(k));
    }
    let t = taylor_face_complex(k)?;
    let (results, text) = taylor_summary(&t);
    Ok(Output::new(results, text).order(k))
}

fn taylor_cycle(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let z = nested_taylor_cycle(ctx.w()?, k)?;
    let results = json!({ "cycle": z, "degree": z.degree });
    Ok(Output::new(results, vec![z.to_string()]).order(k))
}

fn zigzag(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let chain: CellChain = match (&ctx.w, &ctx.cli.chain) {
        (Some(w), _) => w.hurewicz_chain()?,
        (None, Some(c)) => c.parse()?,
        (None, None) => unreachable!("arity checked"),
    };
    let (t, trace) = koszul_to_taylor(k, &chain)?;
    let mut results = json!({ "input": chain, "cycle": t, "degree": t.degree, "trace": trace });
    let mut text = vec![t.to_string()];
    if let Some(w) = &ctx.w {
        if w.is_nested() {
            let closed = nested_taylor_cycle(w, k)?;
            let same = classes_equal_up_to_sign(k, &t, &closed)?;
            results["matches_closed_formula"] = json!(same);
            text.push(format!("homologous to ± the closed formula: {same}"));
        }
    }
    Ok(Output::new(results, text).order(k))
}

fn hochster(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let t = hochster_table(k)?;
    let per_subset: Vec<Value> = t
        .per_subset
        .iter()
        .map(|(j, h)| json!({ "subset": j, "reduced_homology": groups_json(h) }))
        .collect();
    let mut text: Vec<String> = t
        .per_subset
        .iter()
        .map(|(j, h)| {
            let parts: Vec<String> = h.iter().map(|(q, g)| format!("H~_{q} = {}", group_text(g))).collect();
            format!("{j}: {}", parts.join(", "))
        })
        .collect();
    text.extend(table_text(&t.aggregate));
    let results = json!({ "per_subset": per_subset, "aggregate": groups_json(&t.aggregate) });
    Ok(Output::new(results, text).order(k))
}

fn wedge_basis(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let b = shifted_wedge_basis(k, None)?;
    let mut text: Vec<String> = b
        .entries
        .iter()
        .map(|e| format!("{} on {}: {}", e.product, e.subset, e.chain))
        .collect();
    text.push(format!("basis: {} ({} of rank {})", b.is_basis, b.entries.len(), b.total_rank));
    let failed = !b.is_basis;
    let mut out = Output::new(json!(b), text).order(k);
    out.failed = failed;
    Ok(out)
}

fn verify(ctx: &Context) -> Outcome<Output> {
    let k = ctx.complex()?;
    let cellular = zk_homology(k)?;
    let hoch = hochster_table(k)?.aggregate;
    let taylor = taylor_face_complex(k)?.homology();
    let nz = |t: &BTreeMap<i64, HomologyGroup<Int>>| -> BTreeMap<i64, HomologyGroup<Int>> {
        t.iter().filter(|(_, g)| !g.is_zero()).map(|(d, g)| (*d, g.clone())).collect()
    };
    let hochster_agrees = nz(&cellular) == nz(&hoch);
    let taylor_agrees = nz(&cellular) == nz(&taylor);
    let resolution = verify_taylor_is_resolution(&MonomialIdeal::stanley_reisner(k)?, None)?;
    let passed = hochster_agrees && taylor_agrees && resolution.exact;
    let results = json!({
        "cellular": groups_json(&cellular),
        "hochster": groups_json(&hoch),
        "taylor": groups_json(&taylor),
        "hochster_agrees": hochster_agrees,
        "taylor_agrees": taylor_agrees,
        "resolution": resolution,
        "passed": passed,
    });
    let mut text = table_text(&reduced(&cellular));
    text.push(format!("cellular = Hochster: {hochster_agrees}"));
    text.push(format!("cellular = Taylor: {taylor_agrees}"));
    text.push(format!(
        "Taylor resolution exact: {} ({} multidegrees, {} subsets)",
        resolution.exact, resolution.multidegrees_checked, resolution.subsets_checked
    ));
    let mut out = Output::new(results, text).order(k);
    out.failed = !passed;
    Ok(out)
}

fn inputs(cli: &Cli) -> BTreeMap<&'static str, Value> {
    let mut m = BTreeMap::new();
    let mut put = |key, v: &Option<String>| {
        if let Some(x) = v {
            m.insert(key, json!(x));
        }
    };
    put("complex", &cli.complex);
    put("w", &cli.w);
    put("subset", &cli.subset);
    put("chain", &cli.chain);
    if !cli.parts.is_empty() {
        m.insert("parts", json!(cli.parts));
    }
    m.insert("seed", json!(cli.seed));
    m.insert("max_vertices", json!(cli.max_vertices));
    m
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let start = Instant::now();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let timing_ms = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    match cli.format {
        Format::Json => {
            let report = Report {
                verb: cli.verb,
                inputs: inputs(&cli),
                results: &out.results,
                engine_version: ENGINE_VERSION,
                generator_order: out.generator_order.iter().map(|f| f.to_string()).collect(),
                timing_ms,
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
        }
        Format::Text => {
            for line in &out.text {
                println!("{line}");
            }
            if let Some(t) = timing_ms {
                println!("time: {t:.1} ms");
            }
        }
    }
    if out.failed {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
