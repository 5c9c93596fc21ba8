mod svg;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hdqi_core::decoders::{waterfall_csv, waterfall_threshold, BpParams, EmbeddedDecoder, FaultyDecoder};
use hdqi_core::dequant::{clifford_sa, Filter, SaSchedule, SpectralSampler};
use hdqi_core::ensembles::{
    component_csv, component_experiment, independent_stabilizer, semicircle_experiment, semicircle_predict, EnsembleSpec,
    SpinGlassParams,
};
use hdqi_core::noncommuting::{alpha_dp, beta_eval, AnticommGraph};
use hdqi_core::poly::{gibbs_poly, relations_from_hamiltonian, UniPoly};
use hdqi_core::sim::{
    blockwise_decoder, distance_metrics, hdqi_run_with_pilot, rho_direct, rho_of_function, rho_to_json, Pilot, PilotMode,
};
use hdqi_core::{BitVec, BpDecoder, GeDecoder, LookupDecoder, PauliHamiltonian, SymplecticCode, SyndromeDecoder};
use serde::Serialize;
use serde_json::{json, Value};
use svg::Series;

/// Oracle comparisons run only up to this many qubits.
const ORACLE_MAX_QUBITS: usize = 10;

#[derive(Parser)]
#[command(name = "hdqi", version, about = "Experiment drivers for decoded interferometry on Pauli Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Hamiltonian file.
    Gen(GenArgs),
    /// BP waterfall curve and 50% threshold on a random commuting k-local ensemble.
    DecodeWaterfall(WaterfallArgs),
    /// Dense circuit simulation of the filtered state.
    Simulate(SimulateArgs),
    /// Gibbs-state preparation with the Chebyshev filter.
    Gibbs(GibbsArgs),
    /// Exact classical sampling of stabilizer eigenstates under a spectral filter.
    DequantSample(DequantArgs),
    /// Semicircle prediction against a sampled measurement.
    Semicircle(SemicircleArgs),
    /// Anticommutation component sizes under defects.
    Components(ComponentArgs),
    /// Clifford simulated annealing over product stabilizer states.
    Sa(SaArgs),
    /// Antisymmetry character and β-function queries on a graph.
    Alphabeta(AlphabetaArgs),
}

#[derive(Args, Serialize, Clone, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Primary output file; a manifest is written beside it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    /// Render a plot where the experiment has one.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Toric,
    IsingRing,
    Cluster,
    Greedy,
    SpinGlass,
    IndependentStabilizer,
}

#[derive(Args, Serialize, Clone, Debug)]
struct EnsembleArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Lattice or ring size.
    #[arg(long = "L", alias = "l")]
    l: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Spin glass: qubits per term.
    #[arg(long, default_value_t = 3)]
    a: usize,
    /// Spin glass: terms per qubit.
    #[arg(long, default_value_t = 4)]
    b: usize,
    /// Defect probability.
    #[arg(long, default_value_t = 0.0)]
    p: f64,
}

impl EnsembleArgs {
    fn spec(&self) -> Result<EnsembleSpec> {
        let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("--{flag} is required for --kind {:?}", self.kind));
        Ok(match self.kind {
            Kind::Toric => EnsembleSpec::Toric { l: need(self.l, "L")? },
            Kind::IsingRing => EnsembleSpec::IsingRing { l: need(self.l, "L")? },
            Kind::Cluster => EnsembleSpec::Cluster { n: need(self.n.or(self.l), "n")? },
            Kind::Greedy => EnsembleSpec::GreedyKlocal {
                n: need(self.n, "n")?,
                k: need(self.k, "k")?,
                m: need(self.m, "m")?,
            },
            Kind::SpinGlass => EnsembleSpec::SpinGlass(SpinGlassParams {
                a: self.a,
                b: self.b,
                m: need(self.m, "m")?,
                p: self.p,
            }),
            Kind::IndependentStabilizer => EnsembleSpec::IndependentStabilizer { n: need(self.n, "n")? },
        })
    }
}

#[derive(Args, Serialize, Debug)]
struct GenArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct WaterfallArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Terms per qubit, m/n.
    #[arg(long, default_value_t = 3)]
    ratio: usize,
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Success rate defining the threshold.
    #[arg(long, default_value_t = 0.5)]
    target: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "snake_case")]
enum DecoderKind {
    Lookup,
    Ge,
    Bp,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug)]
#[serde(rename_all = "snake_case")]
enum PilotKind {
    Dicke,
    Blockwise,
    Mps,
}

#[derive(Args, Serialize, Debug)]
struct SimulateArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Whitespace-separated monomial coefficients c₀ c₁ … of the polynomial.
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, value_enum, default_value = "lookup")]
    decoder: DecoderKind,
    #[arg(long, value_enum, default_value = "dicke")]
    pilot: PilotKind,
    /// Fraction of errors per weight class whose syndromes are forced to fail.
    #[arg(long)]
    fault_eps: Option<f64>,
    /// Decoding radius; defaults to the polynomial degree.
    #[arg(long)]
    ell: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct GibbsArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Norm bound K; defaults to the term count.
    #[arg(long)]
    norm: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct DequantArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    /// `gibbs:β`, `micro:E`, or `custom:file.json` with an object from energy to weight.
    #[arg(long)]
    filter: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct SemicircleArgs {
    /// Terms (and qubits) of the independent-stabilizer instance.
    #[arg(long, default_value_t = 40)]
    m: usize,
    #[arg(long, default_value_t = 8)]
    ell: usize,
    #[arg(long, default_value_t = 20000)]
    samples: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct ComponentArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct SaArgs {
    /// Hamiltonian file; otherwise a greedy k-local instance is generated.
    #[arg(long)]
    hamiltonian: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 3000)]
    m: usize,
    #[arg(long, default_value_t = 1_000_000)]
    steps: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2.0)]
    t_start: f64,
    #[arg(long, default_value_t = 0.01)]
    t_end: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Debug)]
struct AlphabetaArgs {
    /// First line: node count; then one `i j` edge per line.
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated multiplicities, one per node.
    #[arg(long, value_delimiter = ',')]
    mu: Vec<usize>,
    /// Sequence length for a β query.
    #[arg(long)]
    k: Option<usize>,
    /// Parity pattern for the β query as a 0/1 string.
    #[arg(long)]
    y: Option<String>,
    #[command(flatten)]
    common: Common,
}

/// What a subcommand produced.
struct Report {
    summary: Value,
    text: String,
    outputs: Vec<PathBuf>,
}

fn read_hamiltonian(path: &Path) -> Result<PauliHamiltonian> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PauliHamiltonian::parse_text(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn read_poly(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let coeffs = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(|t| t.parse::<f64>().with_context(|| format!("bad coefficient {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        bail!("{} holds no coefficients", path.display());
    }
    Ok(coeffs)
}

fn read_graph(path: &Path) -> Result<AnticommGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
    let m: usize = lines.next().ok_or_else(|| anyhow!("empty graph file"))?.parse().context("node count")?;
    let edges = lines
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(str::parse).collect::<std::result::Result<_, _>>()?;
            match v[..] {
                [i, j] => Ok((i, j)),
                _ => bail!("edge line {l:?} needs two indices"),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnticommGraph::from_edges(m, &edges)?)
}

fn parse_filter(spec: &str) -> Result<Filter> {
    let (kind, arg) = spec.split_once(':').ok_or_else(|| anyhow!("filter must look like kind:value"))?;
    Ok(match kind {
        "gibbs" => Filter::Gibbs(arg.parse().context("gibbs β")?),
        "micro" => Filter::Micro(arg.parse().context("micro energy")?),
        "custom" => {
            let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            let raw: HashMap<String, f64> = serde_json::from_str(&text).context("custom filter JSON")?;
            let map = raw
                .into_iter()
                .map(|(k, v)| Ok((k.trim().parse::<i64>().with_context(|| format!("energy key {k:?}"))?, v)))
                .collect::<Result<HashMap<_, _>>>()?;
            Filter::Custom(map)
        }
        other => bail!("unknown filter kind {other:?}; expected gibbs, micro or custom"),
    })
}

fn write_out(path: &Path, contents: &str, outputs: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    outputs.push(path.to_path_buf());
    Ok(())
}

fn build_decoder(kind: DecoderKind, code: &SymplecticCode, ell: usize) -> Result<Box<dyn SyndromeDecoder>> {
    Ok(match kind {
        DecoderKind::Lookup => Box::new(LookupDecoder::build(code, ell)?),
        DecoderKind::Ge => Box::new(GeDecoder::build(code)?),
        DecoderKind::Bp => Box::new(BpDecoder::new(code, BpParams::for_radius(ell.max(1), code.num_bits()))?),
    })
}

fn oracle_metrics(rho: &hdqi_core::dense::CMatrix, want: &hdqi_core::dense::CMatrix) -> Result<Value> {
    let (td, f) = distance_metrics(rho, want)?;
    Ok(json!({ "trace_distance": td, "fidelity": f }))
}

fn cmd_gen(a: &GenArgs) -> Result<Report> {
    let spec = a.ensemble.spec()?;
    let h = spec.generate(a.common.seed)?;
    let text = h.to_text();
    let mut outputs = Vec::new();
    match &a.common.out {
        Some(p) => write_out(p, &text, &mut outputs)?,
        None => print!("{text}"),
    }
    Ok(Report {
        summary: json!({ "spec": spec, "qubits": h.num_qubits(), "terms": h.num_terms(), "commuting": h.is_commuting() }),
        text: format!("generated {} terms on {} qubits", h.num_terms(), h.num_qubits()),
        outputs,
    })
}

fn cmd_waterfall(a: &WaterfallArgs) -> Result<Report> {
    let m = a.ratio * a.n;
    let h = hdqi_core::ensembles::greedy_commuting(a.n, a.k, m, a.common.seed, hdqi_core::ensembles::GREEDY_REJECTION_CAP)?;
    let code = SymplecticCode::from_hamiltonian(&h);
    let (threshold, curve) = waterfall_threshold(&code, a.trials, a.target, a.common.seed, a.max_iters)?;
    let csv = waterfall_csv(&curve);
    let mut outputs = Vec::new();
    match &a.common.out {
        Some(p) => write_out(p, &csv, &mut outputs)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &a.common.svg {
        let pts = curve.iter().map(|pt| (pt.flips as f64 / m as f64, pt.rate())).collect();
        let plot = svg::line_plot(
            &format!("BP waterfall, n={}, m={m}", a.n),
            "flip fraction",
            "success rate",
            &[Series { label: "BP".into(), points: pts, color: "steelblue", markers: false }],
        );
        write_out(p, &plot, &mut outputs)?;
    }
    Ok(Report {
        summary: json!({ "n": a.n, "m": m, "threshold": threshold, "points": curve.len() }),
        text: format!("n={} m={m}: {:.0}%-success flip fraction {threshold:.5}", a.n, a.target * 100.0),
        outputs,
    })
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Report> {
    let h = read_hamiltonian(&a.hamiltonian)?;
    let coeffs = read_poly(&a.poly)?;
    let degree = UniPoly::new(coeffs.clone()).degree();
    let ell = a.ell.unwrap_or(degree);
    let mode = match a.pilot {
        PilotKind::Dicke => PilotMode::Dicke,
        PilotKind::Blockwise => PilotMode::Blockwise,
        PilotKind::Mps => PilotMode::Mps,
    };
    let pilot = Pilot::new(&h, &coeffs, mode)?;
    let code = SymplecticCode::from_hamiltonian(&h);
    let decoder: Box<dyn SyndromeDecoder> = match &pilot.expansion {
        // relation-bearing runs decode on the free columns only
        Some(e) => {
            let sub = SymplecticCode::from_hamiltonian(&h.subset(&e.free)?);
            Box::new(EmbeddedDecoder::new(build_decoder(a.decoder, &sub, ell)?, e.free.clone(), h.num_terms())?)
        }
        None => build_decoder(a.decoder, &code, ell)?,
    };
    let decoder: Box<dyn SyndromeDecoder> = match a.fault_eps {
        Some(eps) => Box::new(FaultyDecoder::inject(decoder, &code, ell, eps, a.common.seed)?.0),
        None => decoder,
    };
    // exactness needs distance > 2ℓ on the code the decoder sees
    let checked = match &pilot.expansion {
        Some(e) => SymplecticCode::from_hamiltonian(&h.subset(&e.free)?),
        None => code.clone(),
    };
    let distance_ok = checked.min_distance_bruteforce(2 * ell).ok().map(|d| d.supports_radius(ell));
    if distance_ok == Some(false) {
        eprintln!("warning: code distance is at most 2·{ell}; the output is not expected to match the filtered state");
    }
    let out = hdqi_run_with_pilot(&h, &pilot, decoder.as_ref())?;
    let metrics = if h.num_qubits() <= ORACLE_MAX_QUBITS {
        oracle_metrics(&out.rho, &rho_direct(&h, &coeffs)?)?
    } else {
        Value::Null
    };
    let summary = json!({
        "qubits": h.num_qubits(),
        "terms": h.num_terms(),
        "degree": degree,
        "radius": ell,
        "distance_sufficient": distance_ok,
        "residual_weight": out.residual_weight,
        "vs_direct": metrics,
    });
    let mut outputs = Vec::new();
    if let Some(p) = &a.common.out {
        let doc = json!({ "rho": rho_to_json(&out.rho), "summary": summary });
        write_out(p, &serde_json::to_string_pretty(&doc)?, &mut outputs)?;
    }
    let text = match metrics.get("trace_distance") {
        Some(td) => format!("residual weight {:.3e}, trace distance to direct filter {td}", out.residual_weight),
        None => format!("residual weight {:.3e}", out.residual_weight),
    };
    Ok(Report { summary, text, outputs })
}

fn cmd_gibbs(a: &GibbsArgs) -> Result<Report> {
    let h = read_hamiltonian(&a.hamiltonian)?;
    let k_norm = a.norm.unwrap_or(h.num_terms() as f64);
    let g = gibbs_poly(a.beta, k_norm, a.eps)?;
    let coeffs = g.to_poly().coeffs().to_vec();
    let (pilot, decoder): (Pilot, Box<dyn SyndromeDecoder>) = if h.is_commuting() {
        if relations_from_hamiltonian(&h)?.is_empty() {
            let code = SymplecticCode::from_hamiltonian(&h);
            (Pilot::new(&h, &coeffs, PilotMode::Dicke)?, Box::new(GeDecoder::build(&code)?))
        } else {
            let p = Pilot::new(&h, &coeffs, PilotMode::Blockwise)?;
            let d = blockwise_decoder(&h, p.expansion.as_ref().expect("blockwise pilot carries its expansion"))?;
            (p, Box::new(d))
        }
    } else {
        let code = SymplecticCode::from_hamiltonian(&h);
        (Pilot::new(&h, &coeffs, PilotMode::Mps)?, Box::new(LookupDecoder::build(&code, g.degree)?))
    };
    let out = hdqi_run_with_pilot(&h, &pilot, decoder.as_ref())?;
    let metrics = if h.num_qubits() <= ORACLE_MAX_QUBITS {
        oracle_metrics(&out.rho, &rho_of_function(&h, |x| (-a.beta * x).exp())?)?
    } else {
        Value::Null
    };
    let summary = json!({
        "beta": a.beta,
        "epsilon": a.eps,
        "norm_bound": k_norm,
        "degree": g.degree,
        "pilot": format!("{:?}", pilot.mode),
        "residual_weight": out.residual_weight,
        "vs_exact_gibbs": metrics,
    });
    let mut outputs = Vec::new();
    if let Some(p) = &a.common.out {
        let doc = json!({ "rho": rho_to_json(&out.rho), "summary": summary });
        write_out(p, &serde_json::to_string_pretty(&doc)?, &mut outputs)?;
    }
    let text = match metrics.get("trace_distance") {
        Some(td) => format!("degree {}, trace distance to exact Gibbs state {td}", g.degree),
        None => format!("degree {}", g.degree),
    };
    Ok(Report { summary, text, outputs })
}

fn cmd_dequant(a: &DequantArgs) -> Result<Report> {
    use rand::SeedableRng;
    let h = read_hamiltonian(&a.hamiltonian)?;
    let filter = parse_filter(&a.filter)?;
    let sampler = SpectralSampler::new(&h, &filter)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.common.seed);
    let m = h.num_terms() as f64;
    let mut lines = String::new();
    let mut energy = 0.0;
    for _ in 0..a.samples {
        let (e, t) = sampler.sample(&mut rng)?;
        let lambda = m - 2.0 * e.weight() as f64;
        energy += lambda;
        let mut row = t.to_json();
        row["energy"] = json!(lambda);
        lines.push_str(&serde_json::to_string(&row)?);
        lines.push('\n');
    }
    let mean = energy / a.samples.max(1) as f64;
    let mut outputs = Vec::new();
    match &a.common.out {
        Some(p) => write_out(p, &lines, &mut outputs)?,
        None => print!("{lines}"),
    }
    Ok(Report {
        summary: json!({ "filter": filter, "samples": a.samples, "mean_energy": mean }),
        text: format!("{} samples, mean energy {mean:.4}", a.samples),
        outputs,
    })
}

fn cmd_semicircle(a: &SemicircleArgs) -> Result<Report> {
    let h = independent_stabilizer(a.m, a.common.seed)?;
    let r = semicircle_experiment(&h, a.ell, a.samples, a.common.seed)?;
    let csv = format!(
        "m,ell,predicted,exact,measured,samples\n{},{},{:.6},{:.6},{:.6},{}\n",
        r.m, r.ell, r.predicted, r.exact, r.measured, r.samples
    );
    let mut outputs = Vec::new();
    if let Some(p) = &a.common.out {
        write_out(p, &csv, &mut outputs)?;
    }
    if let Some(p) = &a.common.svg {
        let curve = (0..=100).map(|i| (i as f64 / 100.0, semicircle_predict(i, 100))).collect();
        let plot = svg::line_plot(
            "Satisfied fraction vs degree",
            "ell / m",
            "<E>/m",
            &[
                Series { label: "closed form".into(), points: curve, color: "steelblue", markers: false },
                Series {
                    label: format!("measured, m={}", r.m),
                    points: vec![(r.ell as f64 / r.m as f64, r.measured)],
                    color: "crimson",
                    markers: true,
                },
            ],
        );
        write_out(p, &plot, &mut outputs)?;
    }
    Ok(Report {
        summary: serde_json::to_value(&r)?,
        text: format!(
            "m={} ell={}: measured {:.4}, exact finite-m {:.4}, closed form {:.4}",
            r.m, r.ell, r.measured, r.exact, r.predicted
        ),
        outputs,
    })
}

fn cmd_components(a: &ComponentArgs) -> Result<Report> {
    let spec = a.ensemble.spec()?;
    let s = component_experiment(&spec, a.ensemble.p, a.trials, a.common.seed)?;
    let csv = component_csv(&s);
    let mut outputs = Vec::new();
    match &a.common.out {
        Some(p) => write_out(p, &csv, &mut outputs)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &a.common.svg {
        let maxima: Vec<f64> = s.trials.iter().map(|t| t.max_size as f64).collect();
        let plot = svg::bar_plot(&format!("Largest component per trial, p={}", s.p), "trial", "size", &maxima);
        write_out(p, &plot, &mut outputs)?;
    }
    Ok(Report {
        summary: json!({
            "spec": spec,
            "p": s.p,
            "trials": s.trials.len(),
            "max_over_trials": s.max_over_trials,
            "mean_max": s.mean_max,
            "log_fit": s.log_fit,
        }),
        text: format!(
            "p={}: largest component {} over {} trials (mean {:.1}, {:.2} ln m)",
            s.p,
            s.max_over_trials,
            s.trials.len(),
            s.mean_max,
            s.log_fit
        ),
        outputs,
    })
}

fn cmd_sa(a: &SaArgs) -> Result<Report> {
    let h = match &a.hamiltonian {
        Some(p) => read_hamiltonian(p)?,
        None => hdqi_core::ensembles::greedy_commuting(a.n, a.k, a.m, a.common.seed, hdqi_core::ensembles::GREEDY_REJECTION_CAP)?,
    };
    let schedule = SaSchedule {
        steps: a.steps,
        t_start: a.t_start,
        t_end: a.t_end,
        restarts: a.restarts,
    };
    let r = clifford_sa(&h, &schedule, a.common.seed)?;
    let mut outputs = Vec::new();
    if let Some(p) = &a.common.out {
        let doc = json!({
            "ratio": r.ratio,
            "energy": r.energy,
            "restart_energies": r.restart_energies,
            "trace": r.trace,
            "best": r.best.to_json(),
        });
        write_out(p, &serde_json::to_string_pretty(&doc)?, &mut outputs)?;
    }
    if let Some(p) = &a.common.svg {
        let every = (a.steps / r.trace.len().max(1)).max(1) as f64;
        let pts = r.trace.iter().enumerate().map(|(i, &e)| (i as f64 * every, e)).collect();
        let plot = svg::line_plot(
            "Annealing energy, winning restart",
            "step",
            "energy",
            &[Series { label: "energy".into(), points: pts, color: "steelblue", markers: false }],
        );
        write_out(p, &plot, &mut outputs)?;
    }
    Ok(Report {
        summary: json!({ "schedule": schedule, "ratio": r.ratio, "energy": r.energy, "terms": h.num_terms() }),
        text: format!("approximation ratio {:.4} (energy {})", r.ratio, r.energy),
        outputs,
    })
}

fn cmd_alphabeta(a: &AlphabetaArgs) -> Result<Report> {
    let g = read_graph(&a.graph)?;
    let m = g.num_nodes();
    let mut summary = json!({ "nodes": m, "edges": g.num_edges() });
    let mut text = Vec::new();
    if !a.mu.is_empty() {
        if a.mu.len() != m {
            bail!("--mu has {} entries for a {m}-node graph", a.mu.len());
        }
        let alpha = alpha_dp(&g, &a.mu)?;
        summary["alpha"] = json!(alpha.to_string());
        text.push(format!("alpha = {alpha}"));
    }
    match (a.k, &a.y) {
        (Some(k), Some(y)) => {
            if y.len() != m || y.chars().any(|c| c != '0' && c != '1') {
                bail!("--y must be a 0/1 string of length {m}");
            }
            let bits: Vec<bool> = y.chars().map(|c| c == '1').collect();
            let beta = beta_eval(&g, k, &BitVec::from_bools(&bits))?;
            summary["beta"] = json!(beta.to_string());
            text.push(format!("beta(k={k}, y={y}) = {beta}"));
        }
        (None, None) => {}
        _ => bail!("--k and --y go together"),
    }
    if text.is_empty() {
        bail!("nothing to compute: pass --mu and/or --k with --y");
    }
    let mut outputs = Vec::new();
    if let Some(p) = &a.common.out {
        write_out(p, &serde_json::to_string_pretty(&summary)?, &mut outputs)?;
    }
    Ok(Report {
        summary,
        text: text.join("\n"),
        outputs,
    })
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn run(cli: Cli) -> Result<()> {
    let (name, common, params, report) = match &cli.command {
        Command::Gen(a) => ("gen", &a.common, serde_json::to_value(a)?, cmd_gen(a)?),
        Command::DecodeWaterfall(a) => ("decode-waterfall", &a.common, serde_json::to_value(a)?, cmd_waterfall(a)?),
        Command::Simulate(a) => ("simulate", &a.common, serde_json::to_value(a)?, cmd_simulate(a)?),
        Command::Gibbs(a) => ("gibbs", &a.common, serde_json::to_value(a)?, cmd_gibbs(a)?),
        Command::DequantSample(a) => ("dequant-sample", &a.common, serde_json::to_value(a)?, cmd_dequant(a)?),
        Command::Semicircle(a) => ("semicircle", &a.common, serde_json::to_value(a)?, cmd_semicircle(a)?),
        Command::Components(a) => ("components", &a.common, serde_json::to_value(a)?, cmd_components(a)?),
        Command::Sa(a) => ("sa", &a.common, serde_json::to_value(a)?, cmd_sa(a)?),
        Command::Alphabeta(a) => ("alphabeta", &a.common, serde_json::to_value(a)?, cmd_alphabeta(a)?),
    };
    if let Some(out) = &common.out {
        let manifest = json!({
            "command": name,
            "parameters": params,
            "seed": common.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "outputs": report.outputs,
            "summary": report.summary,
        });
        fs::write(manifest_path(out), serde_json::to_string_pretty(&manifest)?)?;
    }
    if common.json {
        println!("{}", serde_json::to_string_pretty(&report.summary)?);
    } else if common.out.is_some() || matches!(cli.command, Command::Simulate(_) | Command::Gibbs(_) | Command::Semicircle(_) | Command::Sa(_) | Command::Alphabeta(_)) {
        // commands that stream their primary output to stdout keep it clean
        println!("{}", report.text);
    } else {
        eprintln!("{}", report.text);
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
