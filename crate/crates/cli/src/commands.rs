use std::path::{Path, PathBuf};

use qresource::activation::{cnot, default_ancilla, prepare_system};
use qresource::linalg::{c, DensityMatrix, Ket, Tensor};
use qresource::measures::{concurrence, l1_coherence};
use qresource::monotonicity::{p_grid, violation_curve, violation_region};
use qresource::photonics::{effective_gate, process_fidelity_bounds, truth_table, TruthBasis, TruthTable};
use qresource::pipeline::{ideal_activation_sweep, simulated_activation, ActivationPoint, SimulationConfig};
use qresource::superposition::{enumerate_classes, ProductLabel, WitnessKind};
use qresource::tomography::{
    all_settings, mle_reconstruct, monte_carlo_errorbars, Functional, SamplingMode, TomographyDataset,
    TomographyError,
};
use serde::Serialize;

use crate::config::CircuitConfig;
use crate::error::{CliError, Result};
use crate::output::{csv_table, degrees, num, round12, schema_line, OutDir};
use crate::svg::{bar_chart, line_chart, BarSeries, LineSeries};

pub const DEFAULT_SEED: u64 = 42;

pub fn parse_theta_grid(text: &str) -> Result<Vec<f64>> {
    let grid = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("bad theta value '{t}' (degrees expected)")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if grid.is_empty() {
        return Err(CliError::usage("theta grid is empty"));
    }
    Ok(grid)
}

pub fn classify(modulus: f64, arg_deg: f64, out: &Path) -> Result<()> {
    if !modulus.is_finite() || !arg_deg.is_finite() {
        return Err(CliError::usage("overlap modulus and argument must be finite"));
    }
    let s = c(modulus, 0.0) * c(0.0, arg_deg.to_radians()).exp();
    let classes = enumerate_classes(s).map_err(|e| CliError::usage(format!("invalid overlap s: {e}")))?;
    let out = OutDir::create(out)?;

    let mut header = vec!["class", "word", "permutation"];
    let order = ProductLabel::table_order();
    let phase_cols: Vec<String> =
        order.iter().flat_map(|l| [format!("phi{l}_re"), format!("phi{l}_im")]).collect();
    header.extend(phase_cols.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = classes
        .classes
        .iter()
        .map(|cl| {
            let mut row = vec![cl.name.to_string(), cl.word.to_string(), cl.permutation.to_string()];
            for l in order {
                let ph = cl.phase(l);
                row.push(num(ph.re));
                row.push(num(ph.im));
            }
            row
        })
        .collect();
    out.write("classes.csv", &csv_table("classes", 1, &header, &rows))?;

    let rows: Vec<Vec<String>> = classes
        .infeasible
        .iter()
        .map(|(perm, w)| {
            let kind = match w.kind {
                WitnessKind::ModulusMismatch => "modulus",
                WitnessKind::PhaseCycle { .. } => "phase",
            };
            vec![
                perm.to_string(),
                w.a.to_string(),
                w.b.to_string(),
                num(w.source.re),
                num(w.source.im),
                num(w.image.re),
                num(w.image.im),
                kind.to_string(),
                w.to_string(),
            ]
        })
        .collect();
    let header =
        ["permutation", "witness_a", "witness_b", "source_re", "source_im", "image_re", "image_im", "kind", "detail"];
    out.write("infeasible.csv", &csv_table("infeasible", 1, &header, &rows))?;
    println!("{} superposition-free classes, {} infeasible permutations", classes.classes.len(), classes.infeasible.len());
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub enum ActivateMode {
    Ideal,
    Simulated { shots: u64, rounds: usize, seed: u64 },
}

pub fn activate(grid_deg: &[f64], mode: ActivateMode, circuit: Option<&Path>, out: &Path) -> Result<()> {
    let grid: Vec<f64> = grid_deg.iter().map(|d| d.to_radians()).collect();
    let points: Vec<ActivationPoint> = match mode {
        ActivateMode::Ideal => ideal_activation_sweep(&grid)?,
        ActivateMode::Simulated { shots, rounds, seed } => {
            let path = circuit.ok_or_else(|| CliError::usage("simulated mode needs --circuit"))?;
            if shots == 0 {
                return Err(CliError::usage("simulated mode needs --shots > 0"));
            }
            let circuit = CircuitConfig::load(path)?.cnot()?;
            println!("seed: {seed}");
            let cfg = SimulationConfig { shots, rounds, seed };
            grid.iter()
                .enumerate()
                .map(|(i, &theta)| Ok(simulated_activation(&circuit, theta, i, cfg)?.point))
                .collect::<Result<_>>()?
        }
    };
    let out = OutDir::create(out)?;
    let rows: Vec<Vec<String>> = grid_deg
        .iter()
        .zip(&points)
        .map(|(d, p)| {
            vec![degrees(*d), num(p.coherence), num(p.concurrence), num(p.coherence_err), num(p.concurrence_err)]
        })
        .collect();
    let header = ["theta_deg", "coherence", "concurrence", "coherence_err", "concurrence_err"];
    out.write("activation.csv", &csv_table("activation", 1, &header, &rows))?;

    let categories: Vec<String> = grid_deg.iter().map(|d| format!("{}°", degrees(*d))).collect();
    let coh: Vec<f64> = points.iter().map(|p| p.coherence).collect();
    let coh_err: Vec<f64> = points.iter().map(|p| p.coherence_err).collect();
    let conc: Vec<f64> = points.iter().map(|p| p.concurrence).collect();
    let conc_err: Vec<f64> = points.iter().map(|p| p.concurrence_err).collect();
    let svg = bar_chart(
        "Activation of entanglement from coherence",
        "theta",
        "value",
        &categories,
        &[
            BarSeries { name: "input l1 coherence", values: &coh, errors: &coh_err },
            BarSeries { name: "output concurrence", values: &conc, errors: &conc_err },
        ],
    );
    out.write("activation.svg", &svg)?;
    Ok(())
}

pub fn monotonicity(p_min: f64, p_max: f64, p_step: f64, out: &Path) -> Result<()> {
    let grid = p_grid(p_min, p_max, p_step).map_err(CliError::usage)?;
    let points = violation_curve(&grid).map_err(CliError::numerical)?;
    let out = OutDir::create(out)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|v| vec![num(v.p), num(v.upper_bound_et), num(v.average_et), v.violated.to_string()])
        .collect();
    out.write("violation.csv", &csv_table("violation", 1, &["p", "upper_bound", "average", "violated"], &rows))?;
    let ps: Vec<f64> = points.iter().map(|v| v.p).collect();
    let ub: Vec<f64> = points.iter().map(|v| v.upper_bound_et).collect();
    let avg: Vec<f64> = points.iter().map(|v| v.average_et).collect();
    let svg = line_chart(
        "Trace-norm entanglement before and after measurement",
        "p",
        "trace-norm entanglement",
        &ps,
        &[
            LineSeries { name: "upper bound", ys: &ub, dashed: false },
            LineSeries { name: "average after measurement", ys: &avg, dashed: true },
        ],
    );
    out.write("violation.svg", &svg)?;
    match violation_region(&points) {
        Some((lo, hi)) => println!("violated for p in [{lo:.6}, {hi:.6}]"),
        None => println!("no violation on this grid"),
    }
    Ok(())
}

#[derive(Serialize)]
struct FidelityReport {
    schema: String,
    source: &'static str,
    xi: f64,
    shots: u64,
    seed: u64,
    #[serde(rename = "Fzz")]
    fzz: f64,
    #[serde(rename = "Fxx")]
    fxx: f64,
    lower: f64,
    upper: f64,
    capability_lower: f64,
    process_fidelity: f64,
}

fn truth_csv(t: &TruthTable) -> String {
    let labels = t.basis.labels();
    let mut header = vec!["input"];
    header.extend(labels);
    let rows: Vec<Vec<String>> = (0..4)
        .map(|i| {
            let mut row = vec![labels[i].to_string()];
            row.extend(t.probs[i].iter().map(|&p| num(p)));
            row
        })
        .collect();
    csv_table(&format!("truth-{}", t.basis.label().to_lowercase()), 1, &header, &rows)
}

fn density_csv(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let rows: Vec<Vec<String>> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| {
            let z = rho.entry(i, j);
            vec![i.to_string(), j.to_string(), num(z.re), num(z.im)]
        })
        .collect();
    csv_table("density-matrix", 1, &["row", "col", "re", "im"], &rows)
}

pub struct ExperimentArgs<'a> {
    pub circuit: Option<&'a Path>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub grid_deg: &'a [f64],
    pub out: &'a Path,
}

pub fn experiment(args: ExperimentArgs) -> Result<()> {
    let cfg = match args.circuit {
        Some(p) => CircuitConfig::load(p)?,
        None => CircuitConfig::ideal(),
    };
    let shots = args.shots.or(cfg.shots).unwrap_or(0);
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let core = cfg.core()?;
    let cnot_circuit = cfg.cnot()?;
    println!("seed: {seed}");

    let zz = truth_table(&core, TruthBasis::ZZ, shots, seed)?;
    let xx = truth_table(&core, TruthBasis::XX, shots, seed.wrapping_add(1))?;
    let (fzz, fxx, source) = match (cfg.fzz, cfg.fxx) {
        (Some(a), Some(b)) => (a, b, "injected"),
        (None, None) => (zz.fidelity(), xx.fidelity(), "simulated"),
        _ => return Err(CliError::usage("fzz and fxx must be given together")),
    };
    let bounds = process_fidelity_bounds(fzz, fxx)?;
    let process = effective_gate(&cnot_circuit)?;
    let report = FidelityReport {
        schema: schema_line("fidelity", 1).trim_start_matches("# ").to_string(),
        source,
        xi: cfg.xi,
        shots,
        seed,
        fzz: round12(fzz),
        fxx: round12(fxx),
        lower: round12(bounds.lower),
        upper: round12(bounds.upper),
        capability_lower: round12(bounds.capability_lower),
        process_fidelity: round12(process.process_fidelity(&cnot())),
    };

    let out = OutDir::create(args.out)?;
    out.write("truth_zz.csv", &truth_csv(&zz))?;
    out.write("truth_xx.csv", &truth_csv(&xx))?;
    let json = serde_json::to_string_pretty(&report).map_err(CliError::numerical)?;
    out.write("fidelity.json", &(json + "\n"))?;

    for (i, &deg) in args.grid_deg.iter().enumerate() {
        let theta = deg.to_radians();
        let rho = if shots == 0 {
            process.apply(&prepare_system(theta).tensor(&default_ancilla()))?.0
        } else {
            let sim = SimulationConfig { shots, rounds: 0, seed: seed.wrapping_add(2) };
            simulated_activation(&cnot_circuit, theta, i, sim)?.output_estimate
        };
        out.write(&format!("rho_theta_{}.csv", degrees(deg)), &density_csv(&rho))?;
    }
    println!(
        "Fzz = {:.4}, Fxx = {:.4}, process fidelity in [{:.4}, {:.4}]",
        report.fzz, report.fxx, report.lower, report.upper
    );
    Ok(())
}

pub fn named_state(name: &str) -> Result<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one_qubit = |a, b| Ok(Ket::qubit(a, b)?.projector());
    let r: std::result::Result<DensityMatrix, qresource::linalg::LinalgError> = match name {
        "h" => one_qubit(c(1.0, 0.0), c(0.0, 0.0)),
        "v" => one_qubit(c(0.0, 0.0), c(1.0, 0.0)),
        "d" => one_qubit(c(s, 0.0), c(s, 0.0)),
        "a" => one_qubit(c(s, 0.0), c(-s, 0.0)),
        "r" => one_qubit(c(s, 0.0), c(0.0, s)),
        "l" => one_qubit(c(s, 0.0), c(0.0, -s)),
        "bell" => Ok(qresource::linalg::bell_phi_plus()),
        "mixed" => Ok(DensityMatrix::maximally_mixed(vec![2])),
        other => return Err(CliError::usage(format!("unknown state '{other}' (h, v, d, a, r, l, bell, mixed)"))),
    };
    r.map_err(CliError::numerical)
}

#[derive(Serialize)]
struct TomographySummary {
    schema: String,
    n_qubits: usize,
    shots_per_setting: u64,
    sampling: &'static str,
    seed: u64,
    iterations: usize,
    log_likelihood: f64,
    purity: f64,
    coherence: f64,
    coherence_err: f64,
    concurrence: Option<f64>,
    concurrence_err: Option<f64>,
}

pub struct TomographyArgs<'a> {
    pub input: Option<&'a PathBuf>,
    pub state: &'a str,
    pub shots: u64,
    pub sampling: SamplingMode,
    pub rounds: usize,
    pub seed: u64,
    pub out: &'a Path,
}

pub fn tomography(args: TomographyArgs) -> Result<()> {
    let out = OutDir::create(args.out)?;
    let dataset = match args.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read dataset {}: {e}", path.display())))?;
            TomographyDataset::from_csv(&text)?
        }
        None => {
            let rho = named_state(args.state)?;
            let n = rho.dims().len();
            println!("seed: {}", args.seed);
            let ds = if args.shots == 0 {
                TomographyDataset::exact(&rho, &all_settings(n))?
            } else {
                TomographyDataset::simulate(&rho, &all_settings(n), args.shots, args.sampling, args.seed)?
            };
            out.write("dataset.csv", &ds.to_csv())?;
            ds
        }
    };
    let n = dataset.n_qubits();
    let fit = match mle_reconstruct(&dataset) {
        Ok(fit) => fit,
        Err(TomographyError::NotConverged(best)) => {
            return Err(CliError::numerical(format!(
                "maximum likelihood did not converge within {} iterations",
                best.iterations
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let rho = &fit.state;

    let shots = dataset.shots_per_setting;
    let bars = |f: Functional, seed: u64| -> Result<f64> {
        if args.rounds >= 2 && shots > 0 {
            Ok(monte_carlo_errorbars(rho, &all_settings(n), shots, args.rounds, f, seed)?.std)
        } else {
            Ok(0.0)
        }
    };
    let (conc, conc_err) = if n == 2 {
        (Some(concurrence(rho).map_err(CliError::numerical)?), Some(bars(Functional::Concurrence, args.seed.wrapping_add(2))?))
    } else {
        (None, None)
    };
    let summary = TomographySummary {
        schema: "qresource tomography-summary v1".to_string(),
        n_qubits: n,
        shots_per_setting: shots,
        sampling: dataset.mode.name(),
        seed: args.seed,
        iterations: fit.iterations,
        log_likelihood: round12(fit.log_likelihood),
        purity: round12(rho.purity()),
        coherence: round12(l1_coherence(rho)),
        coherence_err: round12(bars(Functional::Coherence, args.seed.wrapping_add(1))?),
        concurrence: conc.map(round12),
        concurrence_err: conc_err.map(round12),
    };
    out.write("rho.csv", &density_csv(rho))?;
    let json = serde_json::to_string_pretty(&summary).map_err(CliError::numerical)?;
    out.write("summary.json", &(json + "\n"))?;
    println!("reconstructed {n}-qubit state in {} iterations", fit.iterations);
    Ok(())
}
