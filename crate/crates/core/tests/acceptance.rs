mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ci_seeker::ci_tools::{
    gh_vectors_model, meci_optimize, scan_surface, EnergyBackend, ExactBackend, MeciOptions,
    ModelBackend,
};
use ci_seeker::cqe::{
    auxiliary_state, cqe_solve, orthogonality_check, residual_from_state, variance_exact,
    variance_taylor, CqeOptions, CqeRun, GeneratorBasis, TwoBodyGenerator,
};
use ci_seeker::exact::{diagonalize, diagonalize_in_sector};
use ci_seeker::integrals::{
    build_hamiltonian, read_fcidump, Ladder, VibronicEmbedding, VibronicModel,
};
use ci_seeker::qubit_map::{
    jw_ladder, mapping_registry, MappingContext, PauliSum, QubitMapping, SymmetrySector,
};
use ci_seeker::simulator::{
    apply_exponential, expectation, s_squared, MeasurementSettings, Statevector, Tensor4,
};
use ci_seeker::solver::default_guesses;
use ci_seeker::vqd::{
    optimizer_registry, vqd_solve, Entangler, OptimizerContext, TwoLocalAnsatz, VqdOptions,
};
use common::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

type Outcome = Result<(bool, String), String>;
type Direction = (Tensor4, f64, Box<dyn Fn(&TwoBodyGenerator) -> f64>);
type Criterion = (&'static str, u64, fn() -> Outcome);

struct System {
    mapping: Box<dyn QubitMapping>,
    h: PauliSum,
}

fn system(mapping: &str) -> System {
    let ints = read_fcidump(asset("cas43.fcidump")).expect("bundled integrals");
    let ctx = MappingContext {
        n_spin_orbitals: ints.n_spin_orbitals(),
        sector: SymmetrySector::new(ints.n_electrons, ints.sz),
    };
    let mapping = mapping_registry().create(mapping, &ctx).expect("mapping");
    let h = mapping
        .map(&build_hamiltonian(&ints))
        .expect("mapped hamiltonian");
    System { mapping, h }
}

fn model() -> VibronicModel {
    VibronicModel::read(asset("vibronic.json")).expect("bundled model")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mapping_correctness() -> Outcome {
    let jw = system("jw");
    let tapered = system("parity-tapered");
    let sector = diagonalize_in_sector(&jw.h, SymmetrySector::new(4, 0.0), 9).map_err(err)?;
    let spectrum = diagonalize(&tapered.h, 16).map_err(err)?;
    let missing: Vec<f64> = spectrum
        .energies
        .iter()
        .copied()
        .filter(|e| !sector.energies.iter().any(|s| (s - e).abs() < 1e-10))
        .collect();
    Ok((
        missing.is_empty(),
        format!(
            "{} of {} tapered eigenvalues found in the (N=4, Sz=0) block; unmatched {:?}",
            16 - missing.len(),
            16,
            missing
        ),
    ))
}

fn anticommutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    let mut s = a.mul(b);
    s.add(&b.mul(a));
    s.simplified()
}

fn car_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for n in 1..=6 {
        let ann: Vec<PauliSum> = (0..n)
            .map(|j| jw_ladder(Ladder::annihilate(j), n))
            .collect();
        let cre: Vec<PauliSum> = (0..n).map(|j| jw_ladder(Ladder::create(j), n)).collect();
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                let mut target = PauliSum::identity(n, c(delta)).simplified();
                let mut d = anticommutator(&ann[i], &cre[j]);
                d.add_scaled(&target, c(-1.0));
                worst = worst.max(d.one_norm());
                target = PauliSum::zero(n);
                for (x, y) in [(&ann[i], &ann[j]), (&cre[i], &cre[j])] {
                    let mut e = anticommutator(x, y);
                    e.add(&target);
                    worst = worst.max(e.one_norm());
                }
                checked += 3;
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("{checked} identities, max deviation {:.1e}", worst.abs()),
    ))
}

fn cqe_pair(sys: &System) -> Result<(CqeRun, CqeRun), String> {
    let guesses = default_guesses(6, SymmetrySector::new(4, 0.0), 2).map_err(err)?;
    let options = CqeOptions::default();
    let mut runs = Vec::new();
    for g in &guesses {
        let start = sys.mapping.from_fock(g).map_err(err)?;
        runs.push(cqe_solve(&sys.h, sys.mapping.as_ref(), &start, &options).map_err(err)?);
    }
    let excited = runs.pop().expect("two runs");
    let ground = runs.pop().expect("two runs");
    Ok((ground, excited))
}

fn cqe_exactness() -> Outcome {
    let sys = system("parity-tapered");
    let exact = diagonalize(&sys.h, 2).map_err(err)?.energies;
    let (ground, excited) = cqe_pair(&sys)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, run, target) in [("S0", &ground, exact[0]), ("S1", &excited, exact[1])] {
        let error = (run.energy - target).abs();
        ok &= run.variance < 1e-10 && error < 1e-6 && run.iterations() <= 30;
        parts.push(format!(
            "{label}: {} iterations, variance {:.1e}, |dE| {:.1e}",
            run.iterations(),
            run.variance,
            error
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn state_specificity() -> Outcome {
    let sys = system("parity-tapered");
    let (ground, excited) = cqe_pair(&sys)?;
    let (overlap, orthogonal) =
        orthogonality_check(&excited.state, &ground.state, 1e-3).map_err(err)?;
    let fock = sys.mapping.to_fock(&excited.state).map_err(err)?;
    let s2 = s_squared(&fock, 6).map_err(err)?;
    Ok((
        excited.converged && orthogonal && s2 < 1e-3,
        format!("|<S1|S0>|^2 {overlap:.1e}, <S^2> {s2:.1e}"),
    ))
}

fn vqd_energies(sys: &System, beta: Option<f64>) -> Result<Vec<f64>, String> {
    let ansatz = TwoLocalAnsatz::new(sys.h.n_qubits(), 4, Entangler::Cx).map_err(err)?;
    let optimizer = optimizer_registry()
        .create("cobyla", &OptimizerContext::default())
        .map_err(err)?;
    let options = VqdOptions {
        beta,
        ..VqdOptions::default()
    };
    let run = vqd_solve(&sys.h, &ansatz, optimizer.as_ref(), &options).map_err(err)?;
    if run.states.iter().any(|s| s.evaluations > options.budget) {
        return Err("evaluation budget exceeded".into());
    }
    Ok(run.states.iter().map(|s| s.energy).collect())
}

fn vqd_correctness() -> Outcome {
    let sys = system("parity-tapered");
    let exact = diagonalize(&sys.h, 2).map_err(err)?.energies;
    let deflated = vqd_energies(&sys, None)?;
    let ablated = vqd_energies(&sys, Some(0.0))?;
    let errors: Vec<f64> = deflated.iter().zip(&exact).map(|(a, b)| a - b).collect();
    let collapse_gap = (ablated[1] - ablated[0]).abs();
    let collapsed = collapse_gap < 1e-4;
    Ok((
        errors.iter().all(|e| e.abs() < 1e-3) && collapsed,
        format!(
            "errors {:.2e}, {:.2e} hartree; beta=0 gap between states {:.2e}, state 1 {:.2e} from E0",
            errors[0],
            errors[1],
            collapse_gap,
            ablated[1] - exact[0]
        ),
    ))
}

fn variance_order() -> Outcome {
    let sys = system("parity-tapered");
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut ratios = Vec::new();
    for _ in 0..20 {
        let psi = random_state(4, &mut rng);
        let exact = variance_exact(&psi, &sys.h);
        let error = |delta: f64| -> Result<f64, String> {
            let aux = auxiliary_state(&psi, &sys.h, delta).map_err(err)?;
            Ok((variance_taylor(&psi, &aux, delta).map_err(err)? - exact).abs())
        };
        ratios.push(error(0.02)? / error(0.01)?);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    Ok((
        lo >= 3.0 && hi <= 5.0,
        format!("error ratios in [{lo:.4}, {hi:.4}]"),
    ))
}

/// Real directions of the anti-Hermitian two-body space with their squared
/// Frobenius weights, and the coordinate of a generator along each.
fn generator_directions(n: usize) -> Vec<Direction> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
        .collect();
    let mut out: Vec<Direction> = Vec::new();
    for (a, &(p, q)) in pairs.iter().enumerate() {
        for &(s, t) in &pairs[a..] {
            if p % 2 + q % 2 != s % 2 + t % 2 {
                continue;
            }
            if (p, q) == (s, t) {
                let mut d = Tensor4::zeros(n);
                d.set(p, q, p, q, Complex64::i());
                out.push((d, 1.0, Box::new(move |f| f.get(p, q, p, q).im)));
                continue;
            }
            let mut re = Tensor4::zeros(n);
            re.set(p, q, s, t, c(1.0));
            re.set(s, t, p, q, c(-1.0));
            out.push((re, 2.0, Box::new(move |f| f.get(p, q, s, t).re)));
            let mut im = Tensor4::zeros(n);
            im.set(p, q, s, t, Complex64::i());
            im.set(s, t, p, q, Complex64::i());
            out.push((im, 2.0, Box::new(move |f| f.get(p, q, s, t).im)));
        }
    }
    out
}

fn residual_descent() -> Outcome {
    let sys = system("parity-tapered");
    let basis = GeneratorBasis::new(sys.mapping.as_ref()).map_err(err)?;
    let directions = generator_directions(6);
    let images: Vec<PauliSum> = directions
        .iter()
        .map(|(d, _, _)| basis.map(&TwoBodyGenerator::from_tensor(d.clone())))
        .collect::<ci_seeker::Result<_>>()
        .map_err(err)?;
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let step = 1e-5;
    let mut worst_cos: f64 = 1.0;
    let mut worst_slope = f64::NEG_INFINITY;
    for _ in 0..20 {
        let psi = random_state(4, &mut rng);
        let variance_along = |g: &PauliSum, eps: f64| -> Result<f64, String> {
            let moved = apply_exponential(&psi, g, c(eps)).map_err(err)?;
            Ok(variance_exact(&moved, &sys.h))
        };
        let f = residual_from_state(&psi, &sys.h, 1e-3, sys.mapping.as_ref()).map_err(err)?;
        let generator = basis.map(&f).map_err(err)?;
        let unit = generator.scaled(c(1.0 / f.norm()));
        let slope = (variance_along(&unit, step)? - variance_along(&unit, -step)?) / (2.0 * step);
        worst_slope = worst_slope.max(slope);
        let mut dot = 0.0;
        let mut grad_sq = 0.0;
        let mut coord_sq = 0.0;
        for ((_, weight, coordinate), image) in directions.iter().zip(&images) {
            let g = (variance_along(image, step)? - variance_along(image, -step)?)
                / (2.0 * step)
                / weight;
            let x = coordinate(&f);
            dot += -g * x * weight;
            grad_sq += g * g * weight;
            coord_sq += x * x * weight;
        }
        worst_cos = worst_cos.min(dot / (grad_sq * coord_sq).sqrt());
    }
    Ok((
        worst_slope < 0.0 && worst_cos > 0.99,
        format!(
            "{} parameters; max directional derivative {worst_slope:.2e}, min cosine {worst_cos:.6}",
            directions.len()
        ),
    ))
}

fn cone_topography() -> Outcome {
    let model = model();
    let backend = ModelBackend {
        model: model.clone(),
    };
    let center = vec![0.0; model.dimension];
    let plane = gh_vectors_model(&model, &center).map_err(err)?;
    let surface = scan_surface(&backend, &center, &plane, (0.1, 0.1), (11, 11)).map_err(err)?;
    let (_, _, min_gap) = surface.min_gap().ok_or("empty surface")?;
    let mut worst_linearity: f64 = 0.0;
    for k in 0..8 {
        let angle = std::f64::consts::PI * k as f64 / 4.0 + 0.1;
        let slopes: Vec<f64> = (1..=10)
            .map(|i| {
                let r = 0.01 * i as f64;
                let x = plane.point(&center, r * angle.cos(), r * angle.sin());
                backend.energies(&x).map(|p| p.gap() / r)
            })
            .collect::<ci_seeker::Result<_>>()
            .map_err(err)?;
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        for s in &slopes {
            worst_linearity = worst_linearity.max((s - mean).abs() / mean);
        }
    }
    let mut worst_seam: f64 = 0.0;
    for axis in 2..model.dimension {
        for t in [-0.1, -0.05, 0.05, 0.1] {
            let mut x = center.clone();
            x[axis] = t;
            worst_seam = worst_seam.max(backend.energies(&x).map_err(err)?.gap());
        }
    }
    Ok((
        min_gap < 1e-12 && worst_linearity < 0.01 && worst_seam < 5e-4,
        format!(
            "min gap {min_gap:.1e}, radial nonlinearity {worst_linearity:.1e}, seam gap {worst_seam:.1e}"
        ),
    ))
}

fn meci_optimization() -> Outcome {
    let model = model();
    let sim = ExactBackend {
        provider: VibronicEmbedding::new(model.clone()),
        mapping: "parity-tapered".into(),
    };
    let exact = ModelBackend {
        model: model.clone(),
    };
    let start = [0.04, 0.04, 0.2, -0.05];
    let start_gap = exact.energies(&start).map_err(err)?.gap();
    let frozen = -0.1;
    let mut options = MeciOptions::new(vec![0, 1, 2, 3]);
    options.freeze = vec![(3, frozen)];
    let result = meci_optimize(&sim, &exact, &start, &options).map_err(err)?;
    let rows = &result.trace.rows;
    let last = rows.last().ok_or("empty trace")?;
    let gap = exact.energies(&result.x).map_err(err)?.gap();
    let monotone = rows.windows(2).all(|w| w[1].exact.gap() < w[0].exact.gap());
    let (s, hess) = (&model.seam_gradient, &model.seam_hessian);
    let x2 = -(s[2] + hess[2][3] * frozen) / hess[2][2];
    let target = [0.0, 0.0, x2, frozen];
    let distance = result
        .x
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        gap < 5e-4
            && last.lagrangian_norm < 0.01
            && last.iteration <= 25
            && monotone
            && distance < 1e-3,
        format!(
            "start gap {start_gap:.4}, final gap {gap:.1e}, Lagrangian norm {:.1e}, {} iterations, monotone {monotone}, distance {distance:.1e}",
            last.lagrangian_norm, last.iteration
        ),
    ))
}

fn shot_statistics() -> Outcome {
    let sys = system("parity-tapered");
    let ground = diagonalize(&sys.h, 1).map_err(err)?;
    let psi: &Statevector = &ground.states[0];
    let exact = expectation(psi, &sys.h, &MeasurementSettings::exact()).map_err(err)?;
    let samples: Vec<f64> = (0..100u64)
        .map(|seed| {
            let settings = MeasurementSettings::sampled(8192, seed)?;
            expectation(psi, &sys.h, &settings)
        })
        .collect::<ci_seeker::Result<_>>()
        .map_err(err)?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let se = sd / n.sqrt();
    let z = (mean - exact) / se;
    Ok((
        z.abs() < 3.0,
        format!(
            "mean offset {:.2e} hartree = {z:.2} standard errors",
            mean - exact
        ),
    ))
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let e = e.expect("entry");
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).expect("output file"),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(err)?;
    let (cas43, h2, vib) = (
        asset("cas43.fcidump"),
        asset("h2.fcidump"),
        asset("vibronic.json"),
    );
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "solve-cqe",
            vec![
                "solve",
                "--fcidump",
                &cas43,
                "--solver",
                "cqe",
                "--shots",
                "8192",
                "--seed",
                "7",
            ],
        ),
        (
            "solve-vqd",
            vec![
                "solve",
                "--fcidump",
                &h2,
                "--solver",
                "vqd",
                "--budget",
                "120",
                "--seed",
                "3",
            ],
        ),
        (
            "solve-exact",
            vec![
                "solve",
                "--fcidump",
                &cas43,
                "--solver",
                "exact",
                "--mapping",
                "jw",
            ],
        ),
        ("scan", vec!["scan", "--model", &vib, "--grid", "9x7"]),
        (
            "meci",
            vec![
                "meci",
                "--model",
                &vib,
                "--geometry",
                "0.04,0.04,0.2,-0.05",
                "--active",
                "0,1,2,3",
                "--freeze",
                "3=-0.1",
            ],
        ),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out = root.path().join(format!("{name}-{attempt}"));
            let status = Command::new(env!("CARGO_BIN_EXE_ci-seeker"))
                .args(args)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(err)?;
            outputs.push((status.status.code(), status.stdout, read_tree(&out)));
        }
        if outputs[0] != outputs[1] || outputs[0].2.is_empty() {
            mismatched.push(*name);
        }
    }
    Ok((
        mismatched.is_empty(),
        format!(
            "{} commands re-run; differing: {:?}",
            commands.len(),
            mismatched
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("mapping correctness", 5, mapping_correctness),
        ("CAR property suite", 5, car_suite),
        ("CQE exactness", 60, cqe_exactness),
        ("state specificity", 60, state_specificity),
        ("VQD correctness", 120, vqd_correctness),
        ("variance estimator order", 10, variance_order),
        ("residual descent", 60, residual_descent),
        ("cone topography", 10, cone_topography),
        ("MECI optimization", 30, meci_optimization),
        ("shot-noise statistics", 120, shot_statistics),
        ("determinism", 30, determinism),
    ];
    let mut failures = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.2}s of {budget}s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
