//! The seven subcommands. Each takes its parsed config, writes artifacts
//! into the output directory, and returns human-readable summary lines.

use crate::config::{
    canonicalize, BandsConfig, ChernConfig, CurvatureMapConfig, MarkerConfig,
    PhaseDiagramConfig, SelfcheckConfig, WannierConfig,
};
use crate::output::{fmt_f64, write_pgm, Csv};
use chernlab::error::Result;
use chernlab::frames::build_pt_frame;
use chernlab::lattice::{dirac_points, kgrid};
use chernlab::model::{
    assemble_flake_corruptible, bands, phase_classify, standard_k_path, BoundaryCondition,
    HaldaneParams,
};
use chernlab::numerics::eigh_dense;
use chernlab::realspace::{chern_marker, fermi_from_spectrum, projection_from_eig};
use chernlab::topology::{
    chern_curvature, chern_fhs, curvature_map, loop_berry_phase, phase_diagram, PhaseCell,
};
use chernlab::numerics::C64;
use chernlab::util::SplitMix64;
use chernlab::wannier::{decay_fit, dichotomy_scan, localization_moment, wannier_from_frame};
use std::f64::consts::PI;
use std::path::Path;

pub fn cmd_bands(cfg: &BandsConfig, out: &Path) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = cfg.geometry()?;
    let p = cfg.params()?;
    let (points, _nodes) = standard_k_path(&g, &p, cfg.samples)?;
    let mut csv = Csv::new("bands", digest, &echo, &["arclength", "k1", "k2", "e_minus", "e_plus"]);
    let mut min_gap = f64::INFINITY;
    let mut min_gap_arc = 0.0;
    for pt in &points {
        if pt.bands.gap() < min_gap {
            min_gap = pt.bands.gap();
            min_gap_arc = pt.arclength;
        }
        csv.row(&[
            fmt_f64(pt.arclength),
            fmt_f64(pt.frac.0),
            fmt_f64(pt.frac.1),
            fmt_f64(pt.bands.e_minus),
            fmt_f64(pt.bands.e_plus),
        ]);
    }
    let path = out.join("bands.csv");
    csv.write(&path).map_err(io_err)?;
    Ok(vec![
        format!("wrote {} ({} rows)", path.display(), cfg.samples),
        format!("min gap along path: {min_gap:.6} at arclength {min_gap_arc:.4}"),
    ])
}

pub fn cmd_chern(cfg: &ChernConfig, out: &Path) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = cfg.geometry()?;
    let p = cfg.params()?;
    let fhs = chern_fhs(&p, &kgrid(&g, cfg.grid_n, cfg.grid_n)?)?;
    let quad = chern_curvature(&p, &kgrid(&g, cfg.curvature_n, cfg.curvature_n)?)?;
    let frame = build_pt_frame(&p, &kgrid(&g, cfg.transport_n, cfg.transport_n)?)?;
    let mut csv = Csv::new("chern", digest, &echo, &["method", "grid", "raw", "c1"]);
    csv.row(&[
        "fhs".into(),
        cfg.grid_n.to_string(),
        fmt_f64(fhs.raw),
        fhs.c1.to_string(),
    ]);
    csv.row(&[
        "curvature_integral".into(),
        cfg.curvature_n.to_string(),
        fmt_f64(quad.raw),
        quad.c1.to_string(),
    ]);
    csv.row(&[
        "pt_obstruction".into(),
        cfg.transport_n.to_string(),
        fmt_f64(frame.obstruction as f64),
        frame.obstruction.to_string(),
    ]);
    let path = out.join("chern.csv");
    csv.write(&path).map_err(io_err)?;
    Ok(vec![
        format!("wrote {}", path.display()),
        format!(
            "c1: fhs = {}, curvature = {} (raw {:.6}), obstruction = {}",
            fhs.c1, quad.c1, quad.raw, frame.obstruction
        ),
    ])
}

pub fn cmd_curvature_map(cfg: &CurvatureMapConfig, out: &Path) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = cfg.geometry()?;
    let p = cfg.params()?;
    let grid = kgrid(&g, cfg.grid_n, cfg.grid_n)?;
    let map = curvature_map(&p, &grid)?;
    let mut csv = Csv::new("curvature-map", digest, &echo, &["i", "j", "f1", "f2", "flux"]);
    for i in 0..cfg.grid_n {
        for j in 0..cfg.grid_n {
            csv.row(&[
                i.to_string(),
                j.to_string(),
                fmt_f64((i as f64 + 0.5) / cfg.grid_n as f64),
                fmt_f64((j as f64 + 0.5) / cfg.grid_n as f64),
                fmt_f64(map.values[i * cfg.grid_n + j]),
            ]);
        }
    }
    let path = out.join("curvature.csv");
    csv.write(&path).map_err(io_err)?;
    Ok(vec![
        format!("wrote {}", path.display()),
        format!("total flux / 2π = {:.6}", map.total_over_two_pi()),
    ])
}

/// Gray levels of the phase-diagram heatmap.
fn phase_gray(cell: &PhaseCell) -> u8 {
    match cell {
        PhaseCell::Gapless => 0,
        PhaseCell::Chern(res) => match res.c1 {
            -1 => 64,
            0 => 160,
            1 => 255,
            _ => 32,
        },
    }
}

pub fn cmd_phase_diagram(
    cfg: &PhaseDiagramConfig,
    out: &Path,
    threads: usize,
) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = chernlab::lattice::build_geometry(cfg.d)?;
    if cfg.phi_samples < 2 || cfg.m_samples < 2 {
        return Err(chernlab::Error::InvalidInput("need at least 2 samples per axis".into()));
    }
    let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let phis = lin(cfg.phi_min, cfg.phi_max, cfg.phi_samples);
    let ms = lin(cfg.m_min, cfg.m_max, cfg.m_samples);
    let diagram = phase_diagram(&g, cfg.t1, cfg.t2, &phis, &ms, cfg.grid_n, threads)?;

    let mut csv = Csv::new("phase-diagram", digest, &echo, &["phi", "m", "status", "c1", "raw"]);
    let mut gapless = 0usize;
    for (i, &phi) in phis.iter().enumerate() {
        for (j, &m) in ms.iter().enumerate() {
            match diagram.cell(i, j) {
                PhaseCell::Gapless => {
                    gapless += 1;
                    csv.row(&[
                        fmt_f64(phi),
                        fmt_f64(m),
                        "gapless".into(),
                        String::new(),
                        String::new(),
                    ]);
                }
                PhaseCell::Chern(res) => {
                    csv.row(&[
                        fmt_f64(phi),
                        fmt_f64(m),
                        "chern".into(),
                        res.c1.to_string(),
                        fmt_f64(res.raw),
                    ]);
                }
            }
        }
    }
    let csv_path = out.join("phase_diagram.csv");
    csv.write(&csv_path).map_err(io_err)?;

    // PGM: φ along the width, M along the height, top row = m_max.
    let mut pixels = vec![0u8; cfg.phi_samples * cfg.m_samples];
    for (i, _) in phis.iter().enumerate() {
        for j in 0..ms.len() {
            let row = ms.len() - 1 - j;
            pixels[row * cfg.phi_samples + i] = phase_gray(diagram.cell(i, j));
        }
    }
    let pgm_path = out.join("phase_diagram.pgm");
    write_pgm(&pgm_path, cfg.phi_samples, cfg.m_samples, &pixels).map_err(io_err)?;
    Ok(vec![
        format!("wrote {}", csv_path.display()),
        format!("wrote {}", pgm_path.display()),
        format!(
            "{} cells ({} flagged gapless)",
            cfg.phi_samples * cfg.m_samples,
            gapless
        ),
    ])
}

pub fn cmd_wannier(cfg: &WannierConfig, out: &Path) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = cfg.geometry()?;
    let p = cfg.params()?;
    let frame = build_pt_frame(&p, &kgrid(&g, cfg.grid_n, cfg.grid_n)?)?;
    let w = wannier_from_frame(&frame)?;

    let mut amps = Csv::new(
        "wannier",
        digest,
        &echo,
        &["g1", "g2", "re_a", "im_a", "re_b", "im_b", "weight"],
    );
    let half = cfg.grid_n as i64 / 2;
    for g1 in (-half + 1)..=half {
        for g2 in (-half + 1)..=half {
            let a: [C64; 2] = w.amp(g1, g2);
            amps.row(&[
                g1.to_string(),
                g2.to_string(),
                fmt_f64(a[0].re),
                fmt_f64(a[0].im),
                fmt_f64(a[1].re),
                fmt_f64(a[1].im),
                fmt_f64(a[0].norm_sqr() + a[1].norm_sqr()),
            ]);
        }
    }
    let amp_path = out.join("wannier.csv");
    amps.write(&amp_path).map_err(io_err)?;

    let mut summary = Csv::new("wannier-summary", digest, &echo, &["metric", "value"]);
    summary.row(&["grid_n".into(), cfg.grid_n.to_string()]);
    summary.row(&["obstruction".into(), frame.obstruction.to_string()]);
    summary.row(&["total_weight".into(), fmt_f64(w.total_weight())]);
    for &s in &cfg.s_values {
        let m = localization_moment(&w, s)?;
        summary.row(&[format!("moment_s={s}"), fmt_f64(m.moment)]);
    }
    let fit = decay_fit(&w)?;
    summary.row(&["decay_rate".into(), fmt_f64(fit.rate)]);
    summary.row(&["decay_r2".into(), fmt_f64(fit.r2)]);
    summary.row(&["power_exponent".into(), fmt_f64(fit.power_exponent)]);
    summary.row(&["power_r2".into(), fmt_f64(fit.power_r2)]);
    if !cfg.scan_sizes.is_empty() {
        let scan = dichotomy_scan(&p, &g, &cfg.scan_sizes, &cfg.s_values)?;
        for row in &scan.rows {
            for m in &row.moments {
                summary.row(&[format!("scan_n={}_s={}", row.size, m.s), fmt_f64(m.moment)]);
            }
        }
    }
    let sum_path = out.join("wannier_summary.csv");
    summary.write(&sum_path).map_err(io_err)?;
    Ok(vec![
        format!("wrote {}", amp_path.display()),
        format!("wrote {}", sum_path.display()),
        format!(
            "obstruction {} | decay rate {:.4} (r² {:.4}) | power exponent {:.3} (r² {:.4})",
            frame.obstruction, fit.rate, fit.r2, fit.power_exponent, fit.power_r2
        ),
    ])
}

pub fn cmd_marker(cfg: &MarkerConfig, out: &Path) -> Result<Vec<String>> {
    let (echo, digest) = canonicalize(cfg);
    let g = cfg.geometry()?;
    let p = cfg.params()?;
    // Bulk gap from the closed-form bands, for the edge-state census.
    let grid = kgrid(&g, 60, 60)?;
    let e_minus_max = grid
        .points
        .iter()
        .map(|k| bands(&p, k).e_minus)
        .fold(f64::NEG_INFINITY, f64::max);
    let e_plus_min = grid
        .points
        .iter()
        .map(|k| bands(&p, k).e_plus)
        .fold(f64::INFINITY, f64::min);

    let mut csv = Csv::new(
        "marker",
        digest,
        &echo,
        &["n", "dim", "fermi", "edge_states", "box_halfwidth", "cells_in_box", "trace", "marker"],
    );
    let mut lines = Vec::new();
    for &n in &cfg.sizes {
        let sample =
            chernlab::model::assemble_flake(&g, &p, n, n, BoundaryCondition::Open)?;
        let eig = eigh_dense(&sample.hamiltonian)?;
        let (fermi, edge_states) =
            fermi_from_spectrum(&eig.eigenvalues, 0.0, Some((e_minus_max, e_plus_min)))?;
        let proj = projection_from_eig(&eig, fermi)?;
        let l = cfg.box_ratio * sample.inradius();
        let report = chern_marker(&sample, &proj, l)?;
        csv.row(&[
            n.to_string(),
            sample.dim().to_string(),
            fmt_f64(fermi),
            edge_states.to_string(),
            fmt_f64(report.l),
            report.cells_in_box.to_string(),
            fmt_f64(report.trace_value),
            fmt_f64(report.marker),
        ]);
        lines.push(format!(
            "n={n}: marker {:.4} ({} cells in box, {} in-gap states)",
            report.marker, report.cells_in_box, edge_states
        ));
    }
    let path = out.join("marker.csv");
    csv.write(&path).map_err(io_err)?;
    lines.insert(0, format!("wrote {}", path.display()));
    Ok(lines)
}

/// The self-check: cross-method Chern agreement, periodic-flake spectral
/// equivalence, the Stokes loop identity, the dichotomy signature, and
/// seeded gauge invariance. Returns (report lines, all passed). The
/// report is free of timing and environment data, so identical configs
/// produce byte-identical reports.
pub fn run_selfcheck(cfg: &SelfcheckConfig) -> Result<(Vec<String>, bool)> {
    let g = chernlab::lattice::build_geometry(1.0)?;
    let mut lines = Vec::new();
    let mut all_ok = true;
    let check = |name: &str, ok: bool, detail: String, lines: &mut Vec<String>| {
        lines.push(format!("{} {name} {detail}", if ok { "PASS" } else { "FAIL" }));
        ok
    };

    let sets = [
        ("cyan", HaldaneParams::new(1.0, 0.25, PI / 2.0, 0.0)?),
        ("orange", HaldaneParams::new(1.0, 0.25, -PI / 2.0, 0.0)?),
        ("trivial", HaldaneParams::trivial_reference()),
    ];

    // Periodic-flake spectral equivalence (the NNN sign-convention oracle).
    for (name, p) in &sets {
        let sample = assemble_flake_corruptible(
            &g,
            p,
            6,
            6,
            BoundaryCondition::Periodic,
            cfg.corrupt_nnn_sign,
        )?;
        let eig = eigh_dense(&sample.hamiltonian)?;
        let grid = kgrid(&g, 6, 6)?;
        let mut expected: Vec<f64> = grid
            .points
            .iter()
            .flat_map(|k| {
                let b = bands(p, k);
                [b.e_minus, b.e_plus]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        let worst = eig
            .eigenvalues
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        all_ok &= check(
            &format!("spectral-equivalence-{name}"),
            worst < 1e-8,
            format!("worst={worst:.3e} tol=1e-8"),
            &mut lines,
        );
    }

    // Cross-method Chern agreement.
    let coarse = kgrid(&g, 24, 24)?;
    let fine = kgrid(&g, 96, 96)?;
    for (name, p) in &sets {
        let fhs = chern_fhs(p, &coarse)?;
        let quad = chern_curvature(p, &fine)?;
        let expect = phase_classify(p)?.expected_c1();
        let agree = (quad.raw - fhs.c1 as f64).abs() < 1e-3 && Some(fhs.c1) == expect;
        all_ok &= check(
            &format!("chern-agreement-{name}"),
            agree,
            format!("fhs={} quad_raw={:.6} expected={expect:?}", fhs.c1, quad.raw),
            &mut lines,
        );
    }

    // Stokes loop identity around K.
    let (k_point, _) = dirac_points(&g);
    let loop_chern = loop_berry_phase(&sets[0].1, &g, &k_point, 0.02, 256)?;
    all_ok &= check(
        "stokes-loop-chern",
        (loop_chern - 2.0 * PI).abs() < 5e-2,
        format!("phase={loop_chern:.6} target={:.6}", 2.0 * PI),
        &mut lines,
    );
    let loop_trivial = loop_berry_phase(&sets[2].1, &g, &k_point, 0.02, 256)?;
    all_ok &= check(
        "stokes-loop-trivial",
        loop_trivial.abs() < 5e-2,
        format!("phase={loop_trivial:.6} target=0"),
        &mut lines,
    );

    // Localization dichotomy signature at desk scale.
    let s_values = [1.0];
    let chern_scan = dichotomy_scan(&sets[0].1, &g, &[24, 48], &s_values)?;
    let chern_ratio = chern_scan.growth_ratios(0)[0];
    all_ok &= check(
        "dichotomy-chern-growth",
        chern_ratio >= 1.05,
        format!("moment1_ratio={chern_ratio:.4} min=1.05"),
        &mut lines,
    );
    let trivial_scan = dichotomy_scan(&sets[2].1, &g, &[24, 48], &s_values)?;
    let trivial_ratio = trivial_scan.growth_ratios(0)[0];
    all_ok &= check(
        "dichotomy-trivial-stable",
        (trivial_ratio - 1.0).abs() < 0.02,
        format!("moment1_ratio={trivial_ratio:.6} band=2%"),
        &mut lines,
    );
    let frame = build_pt_frame(&sets[2].1, &kgrid(&g, 48, 48)?)?;
    let fit = decay_fit(&wannier_from_frame(&frame)?)?;
    all_ok &= check(
        "dichotomy-trivial-exponential",
        fit.r2 > 0.99 && fit.rate > 0.0,
        format!("rate={:.4} r2={:.6}", fit.rate, fit.r2),
        &mut lines,
    );

    // Seeded gauge invariance of the link-variable Chern number.
    let mut rng = SplitMix64::new(cfg.seed);
    let states: Vec<[C64; 2]> = coarse
        .points
        .iter()
        .map(|k| chernlab::frames::bloch_state_explicit(&sets[0].1, k).map(|s| s.v))
        .collect::<Result<_>>()?;
    let base = fhs_of(&states, 24)?;
    let mut worst_drift = 0.0_f64;
    for _ in 0..5 {
        let rotated: Vec<[C64; 2]> = states
            .iter()
            .map(|s| {
                let ph = C64::from_polar(1.0, rng.range(-PI, PI));
                [s[0] * ph, s[1] * ph]
            })
            .collect();
        worst_drift = worst_drift.max((fhs_of(&rotated, 24)? - base).abs());
    }
    all_ok &= check(
        "fhs-gauge-invariance",
        worst_drift < 1e-10,
        format!("seed={} worst_drift={worst_drift:.3e} tol=1e-10", cfg.seed),
        &mut lines,
    );

    lines.push(format!(
        "selfcheck {}",
        if all_ok { "PASS" } else { "FAIL" }
    ));
    Ok((lines, all_ok))
}

/// Raw FHS total of an explicit state field, via a throwaway frame.
fn fhs_of(states: &[[C64; 2]], n: usize) -> Result<f64> {
    let g = chernlab::lattice::build_geometry(1.0)?;
    let frame = chernlab::frames::BlochFrame {
        grid: kgrid(&g, n, n)?,
        states: states.to_vec(),
        gauge: chernlab::frames::Gauge::ExplicitRealGauge,
        obstruction: 0,
    };
    // The frame wrapper only carries the states; the link-variable sum is
    // what we are after.
    let dot = |a: [C64; 2], b: [C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let u1 = dot(frame.state(i, j), frame.state((i + 1) % n, j));
            let u2 = dot(frame.state((i + 1) % n, j), frame.state((i + 1) % n, (j + 1) % n));
            let u3 = dot(frame.state(i, (j + 1) % n), frame.state((i + 1) % n, (j + 1) % n));
            let u4 = dot(frame.state(i, j), frame.state(i, (j + 1) % n));
            total += (u1 * u2 * u3.conj() * u4.conj()).arg();
        }
    }
    Ok(total / (2.0 * PI))
}

pub fn cmd_selfcheck(cfg: &SelfcheckConfig, out: &Path) -> Result<(Vec<String>, bool)> {
    let (echo, digest) = canonicalize(cfg);
    let (lines, ok) = run_selfcheck(cfg)?;
    let mut report = format!("# chernlab selfcheck digest={digest:016x} config={echo}\n");
    for line in &lines {
        report.push_str(line);
        report.push('\n');
    }
    let path = out.join("selfcheck_report.txt");
    std::fs::write(&path, &report).map_err(io_err)?;
    let mut summary = lines;
    summary.push(format!("wrote {}", path.display()));
    Ok((summary, ok))
}

fn io_err(e: std::io::Error) -> chernlab::Error {
    chernlab::Error::InvalidInput(format!("io error: {e}"))
}
