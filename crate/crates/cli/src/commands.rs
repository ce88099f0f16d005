use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use torus_wigner::{
    baker_eigen_wigner, build_baker, build_kernel, cross_eigen_wigner, enumerate_orbits, orbit_to_pixels,
    propagator_columns, scar_scan, to_doubled, wigner_inverse, wigner_propagator_direct_with_capacity,
    wigner_propagator_spectral_with_capacity, wigner_transform, AxisConvention, ClassicalOrbit, ColumnRoute, Complex64,
    ComplexGrid, DensityMatrix, OrbitPixel, PureState, UnitaryMap, WignerGrid, WignerPlan,
};

use crate::args::{Cli, Command, Pair, Route, Selection};
use crate::error::{CliError, CliResult};
use crate::io;

/// Shared output settings.
struct Sink<'a> {
    cli: &'a Cli,
    written: Vec<String>,
}

impl<'a> Sink<'a> {
    fn new(cli: &'a Cli) -> Self {
        Self {
            cli,
            written: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.cli.out.join(name);
        io::write_file(&path, bytes)?;
        self.written.push(format!("wrote {}", path.display()));
        Ok(())
    }

    /// Complex grid as CSV and its real part as PGM, per `--format`.
    fn grid(&mut self, stem: &str, grid: &ComplexGrid, header: &str) -> CliResult<()> {
        if self.cli.format.csv() {
            self.write(&format!("{stem}.csv"), io::complex_grid_csv(grid, header).as_bytes())?;
        }
        if self.cli.format.pgm() {
            let re = grid.real_parts();
            self.write(
                &format!("{stem}.pgm"),
                &io::pgm(grid.rows(), grid.cols(), &re, self.cli.symmetric),
            )?;
        }
        Ok(())
    }

    fn real_grid(&mut self, stem: &str, n: usize, values: &[f64], header: &str) -> CliResult<()> {
        if self.cli.format.csv() {
            self.write(
                &format!("{stem}.csv"),
                io::real_grid_csv(n, n, values, header).as_bytes(),
            )?;
        }
        if self.cli.format.pgm() {
            self.write(&format!("{stem}.pgm"), &io::pgm(n, n, values, self.cli.symmetric))?;
        }
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<String> {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        self.write(name, text.as_bytes())?;
        Ok(text)
    }
}

pub fn run(cli: &Cli) -> CliResult<Vec<String>> {
    let mut sink = Sink::new(cli);
    let mut lines = Vec::new();
    match &cli.command {
        Command::Kernel { n } => kernel(&mut sink, *n)?,
        Command::Wigner {
            input,
            n,
            double,
            check,
        } => lines = wigner(&mut sink, input, *n, *double, *check)?,
        Command::Inverse { input, n } => inverse(&mut sink, input, *n)?,
        Command::BakerEigen {
            n,
            select,
            pair,
            period,
            axis_convention,
        } => lines = baker_eigen(&mut sink, *n, *select, *pair, period, (*axis_convention).into())?,
        Command::Propagate {
            n,
            unitary,
            m_prime,
            t,
            route,
            full,
            capacity,
        } => {
            lines = propagate(
                &mut sink,
                PropagateArgs {
                    n: *n,
                    unitary: unitary.as_deref(),
                    m_prime: *m_prime,
                    steps: t,
                    route: *route,
                    full: *full,
                    capacity: *capacity,
                },
            )?
        }
        Command::Orbits {
            period,
            n,
            axis_convention,
        } => lines = orbits(&mut sink, *period, *n, (*axis_convention).into())?,
        Command::Selftest { n_max } => lines = selftest(&mut sink, *n_max)?,
    }
    let mut out = sink.written;
    out.extend(lines);
    Ok(out)
}

fn check_n(expected: Option<usize>, found: usize) -> CliResult<()> {
    match expected {
        Some(n) if n != found => Err(CliError::Usage(format!(
            "--n {n} does not match input dimension {found}"
        ))),
        _ => Ok(()),
    }
}

fn kernel(sink: &mut Sink, n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let k = build_kernel(n)?;
    let mut text = io::header(&[
        ("command", "kernel".into()),
        ("n", n.to_string()),
        ("columns", "k,re,im".into()),
    ]);
    text.push('\n');
    for (idx, z) in k.entries() {
        text.push_str(&format!("{idx},{},{}\n", io::fmt_f64(z.re), io::fmt_f64(z.im)));
    }
    sink.write(&format!("kernel_n{n}.csv"), text.as_bytes())
}

fn read_density(path: &Path) -> CliResult<DensityMatrix> {
    let text = io::read_text(path)?;
    let name = path.display().to_string();
    if io::looks_like_state(&text) {
        let amps = io::parse_state(&name, &text)?;
        Ok(DensityMatrix::from_pure(&PureState::new(amps)?))
    } else {
        Ok(DensityMatrix::new(io::parse_complex_grid(&name, &text)?)?)
    }
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn wigner(sink: &mut Sink, input: &Path, n: Option<usize>, double: bool, check: bool) -> CliResult<Vec<String>> {
    let rho = read_density(input)?;
    let dim = rho.dim();
    check_n(n, dim)?;
    let params = |kind: &str| {
        io::header(&[
            ("command", "wigner".into()),
            ("n", dim.to_string()),
            ("input", file_label(input)),
            ("grid", kind.into()),
            ("kind", "complex".into()),
        ])
    };
    if double {
        let g = to_doubled(&rho)?;
        sink.grid("wigner_double", g.grid(), &params("double"))?;
    } else {
        let w = wigner_transform(&rho)?;
        sink.grid("wigner", w.grid(), &params("wigner"))?;
    }
    if !check {
        return Ok(Vec::new());
    }
    let plan = WignerPlan::new(dim)?;
    let conv = plan.convolve(&rho)?;
    let cut = plan.fourier_cut(&rho)?;
    let route_discrepancy = conv.max_abs_diff(&cut);
    let round_trip = plan.inverse(&conv)?.grid().max_abs_diff(rho.grid());
    let report = json!({
        "n": dim,
        "route_discrepancy": route_discrepancy,
        "round_trip_error": round_trip,
        "sum": [conv.sum().re, conv.sum().im],
        "trace": [rho.trace().re, rho.trace().im],
        "hermiticity_defect": rho.hermiticity_defect(),
        "max_abs_imag": conv.max_abs_imag(),
        "tolerance": 1e-10,
    });
    sink.json("wigner_check.json", &report)?;
    let line = format!("route discrepancy {route_discrepancy:e}, round-trip error {round_trip:e}");
    if route_discrepancy > 1e-10 || round_trip > 1e-10 {
        return Err(CliError::CheckFailed(line));
    }
    Ok(vec![line])
}

fn inverse(sink: &mut Sink, input: &Path, n: Option<usize>) -> CliResult<()> {
    let grid = io::parse_complex_grid(&input.display().to_string(), &io::read_text(input)?)?;
    check_n(n, grid.rows())?;
    let rho = wigner_inverse(&WignerGrid::new(grid)?)?;
    let header = io::header(&[
        ("command", "inverse".into()),
        ("n", rho.dim().to_string()),
        ("input", file_label(input)),
        ("kind", "complex".into()),
    ]);
    sink.write("density.csv", io::complex_grid_csv(rho.grid(), &header).as_bytes())
}

#[derive(Serialize)]
struct OrbitEntry<'a> {
    points: &'a [torus_wigner::PhasePoint],
    pixels: Vec<OrbitPixel>,
}

fn orbit_entries(orbits: &[ClassicalOrbit], n: Option<usize>, conv: AxisConvention) -> CliResult<Vec<OrbitEntry<'_>>> {
    orbits
        .iter()
        .map(|o| {
            Ok(OrbitEntry {
                points: &o.points,
                pixels: match n {
                    Some(n) => orbit_to_pixels(o, n, conv)?,
                    None => Vec::new(),
                },
            })
        })
        .collect()
}

fn baker_eigen(
    sink: &mut Sink,
    n: usize,
    select: Selection,
    pair: Option<Pair>,
    periods: &[usize],
    conv: AxisConvention,
) -> CliResult<Vec<String>> {
    let (dec, grids) = baker_eigen_wigner(n)?;
    let mut sections = Vec::new();
    let mut first_ranking = None;
    for &k in periods {
        let orbits = enumerate_orbits(k)?;
        let scan = scar_scan(&grids, &orbits, conv)?;
        first_ranking.get_or_insert_with(|| scan.ranking.clone());
        sections.push(json!({
            "period": k,
            "orbits": orbit_entries(&orbits, Some(n), conv)?,
            "scan": scan,
        }));
    }
    let selected: Vec<usize> = match select {
        Selection::All => (0..n).collect(),
        Selection::Index(a) if a < n => vec![a],
        Selection::Index(a) => {
            return Err(CliError::Usage(format!(
                "eigenstate index {a} out of range for N = {n}"
            )))
        }
        Selection::Top(k) => {
            let ranking = first_ranking.ok_or_else(|| CliError::Usage("top:K needs at least one --period".into()))?;
            ranking.into_iter().take(k).collect()
        }
    };
    let header = |what: &str, kind: &str| {
        io::header(&[
            ("command", "baker-eigen".into()),
            ("n", n.to_string()),
            ("state", what.into()),
            ("axis_convention", conv.to_string()),
            ("kind", kind.into()),
        ])
    };
    let width = n.to_string().len();
    let max_imag = grids.iter().map(WignerGrid::max_abs_imag).fold(0.0, f64::max);
    for &a in &selected {
        sink.grid(
            &format!("eigen_{a:0width$}"),
            grids[a].grid(),
            &header(&a.to_string(), "complex"),
        )?;
    }
    if let Some(Pair(a, b)) = pair {
        if a >= n || b >= n {
            return Err(CliError::Usage(format!("pair ({a}, {b}) out of range for N = {n}")));
        }
        let w = cross_eigen_wigner(&dec.eigenvector(a), &dec.eigenvector(b))?;
        let label = format!("{a},{b}");
        let re: Vec<f64> = w.grid().data().iter().map(|z| z.re).collect();
        let im: Vec<f64> = w.grid().data().iter().map(|z| z.im).collect();
        sink.real_grid(
            &format!("cross_{a:0width$}_{b:0width$}_re"),
            n,
            &re,
            &header(&label, "real"),
        )?;
        sink.real_grid(
            &format!("cross_{a:0width$}_{b:0width$}_im"),
            n,
            &im,
            &header(&label, "imag"),
        )?;
    }
    let report = json!({
        "n": n,
        "axis_convention": conv,
        "eigenphases": dec.phases(),
        "max_abs_imag_diagonal": max_imag,
        "selected": selected,
        "periods": sections,
    });
    sink.json(&format!("baker_eigen_n{n}.json"), &report)?;
    Ok(vec![format!("selected eigenstates {selected:?}")])
}

struct PropagateArgs<'a> {
    n: Option<usize>,
    unitary: Option<&'a Path>,
    m_prime: Pair,
    steps: &'a [u32],
    route: Route,
    full: bool,
    capacity: usize,
}

fn propagate(sink: &mut Sink, args: PropagateArgs) -> CliResult<Vec<String>> {
    let (u, source) = match args.unitary {
        Some(path) => {
            let g = io::parse_complex_grid(&path.display().to_string(), &io::read_text(path)?)?;
            check_n(args.n, g.rows())?;
            (UnitaryMap::from_grid(&g)?, file_label(path))
        }
        None => {
            let n = args
                .n
                .ok_or_else(|| CliError::Usage("either --n or --unitary is required".into()))?;
            (build_baker(n)?, "baker".to_string())
        }
    };
    let n = u.n();
    if args.steps.is_empty() {
        return Err(CliError::Usage("--t needs at least one step count".into()));
    }
    let m = (args.m_prime.0, args.m_prime.1);
    let primary = match args.route {
        Route::Spectral => ColumnRoute::Spectral,
        _ => ColumnRoute::Direct,
    };
    let columns = propagator_columns(&u, m, args.steps, primary)?;
    let mut discrepancy = None;
    if args.route == Route::Both {
        let other = propagator_columns(&u, m, args.steps, ColumnRoute::Spectral)?;
        discrepancy = Some(
            columns
                .iter()
                .zip(&other)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max),
        );
    }
    let mut full_discrepancy = None;
    if args.full {
        let mut worst = 0.0f64;
        for (&t, col) in args.steps.iter().zip(&columns) {
            let d = wigner_propagator_direct_with_capacity(&u, t, args.capacity)?;
            worst = worst.max(d.column(m.0, m.1)?.max_abs_diff(col));
            if args.route == Route::Both {
                let s = wigner_propagator_spectral_with_capacity(&u, t, args.capacity)?;
                worst = worst.max(d.max_abs_diff(&s));
            }
        }
        full_discrepancy = Some(worst);
    }
    let route_name = match primary {
        ColumnRoute::Direct => "direct",
        ColumnRoute::Spectral => "spectral",
    };
    let mut per_step = Vec::new();
    for (&t, col) in args.steps.iter().zip(&columns) {
        let header = io::header(&[
            ("command", "propagate".into()),
            ("n", n.to_string()),
            ("unitary", source.clone()),
            ("m_prime", format!("{},{}", m.0, m.1)),
            ("t", t.to_string()),
            ("route", route_name.into()),
            ("kind", "complex".into()),
        ]);
        sink.grid(&format!("propagator_t{t}"), col.grid(), &header)?;
        let data = col.grid().data();
        let peak = (0..data.len()).fold(0, |best, i| if data[i].norm() > data[best].norm() { i } else { best });
        per_step.push(json!({
            "t": t,
            "sum": [col.sum().re, col.sum().im],
            "max_abs_imag": col.max_abs_imag(),
            "peak": [peak / n, peak % n],
            "peak_abs": data[peak].norm(),
        }));
    }
    let report = json!({
        "n": n,
        "unitary": source,
        "m_prime": [m.0, m.1],
        "route": format!("{:?}", args.route).to_lowercase(),
        "steps": per_step,
        "route_discrepancy": discrepancy,
        "full_discrepancy": full_discrepancy,
        "tolerance": 1e-8,
    });
    sink.json("propagate_report.json", &report)?;
    let mut lines = Vec::new();
    for (label, value) in [
        ("route discrepancy", discrepancy),
        ("full discrepancy", full_discrepancy),
    ] {
        if let Some(d) = value {
            let line = format!("{label} {d:e}");
            if d > 1e-8 {
                return Err(CliError::CheckFailed(line));
            }
            lines.push(line);
        }
    }
    Ok(lines)
}

fn orbits(sink: &mut Sink, period: usize, n: Option<usize>, conv: AxisConvention) -> CliResult<Vec<String>> {
    if n == Some(0) {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let found = enumerate_orbits(period)?;
    let report = json!({
        "period": period,
        "n": n,
        "axis_convention": conv,
        "orbits": orbit_entries(&found, n, conv)?,
    });
    let text = sink.json(&format!("orbits_k{period}.json"), &report)?;
    Ok(vec![text.trim_end().to_string()])
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    DensityMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn selftest(sink: &mut Sink, n_max: usize) -> CliResult<Vec<String>> {
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checks = Vec::new();
    let mut push = |name: String, value: f64, tolerance: f64| {
        checks.push(Check {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        })
    };
    for n in 1..=n_max {
        let plan = WignerPlan::new(n)?;
        let rho = random_matrix(&mut rng, n);
        let herm = DensityMatrix::new(rho.grid().axpby(
            Complex64::new(1.0, 0.0),
            rho.adjoint().grid(),
            Complex64::new(1.0, 0.0),
        )?)?;
        let w = plan.convolve(&rho)?;
        push(
            format!("round trip N={n}"),
            plan.inverse(&w)?.grid().max_abs_diff(rho.grid()),
            1e-10,
        );
        push(
            format!("route equivalence N={n}"),
            w.max_abs_diff(&plan.fourier_cut(&rho)?),
            1e-10,
        );
        let wh = plan.convolve(&herm)?;
        push(format!("reality N={n}"), wh.max_abs_imag(), 1e-10);
        push(format!("normalization N={n}"), (wh.sum() - herm.trace()).norm(), 1e-10);
    }
    for n in (2..=n_max.min(8)).step_by(2) {
        let u = build_baker(n)?;
        for t in 0..=2 {
            let d = wigner_propagator_direct_with_capacity(&u, t, n)?;
            let s = wigner_propagator_spectral_with_capacity(&u, t, n)?;
            push(format!("propagator routes N={n} t={t}"), d.max_abs_diff(&s), 1e-8);
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    sink.json("selftest.json", &json!({ "checks": checks, "failed": failed }))?;
    let mut lines: Vec<String> = checks
        .iter()
        .map(|c| format!("{} {} {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value))
        .collect();
    if failed > 0 {
        return Err(CliError::CheckFailed(format!("{failed} of {} checks", checks.len())));
    }
    lines.push(format!("{} checks passed", checks.len()));
    Ok(lines)
}
