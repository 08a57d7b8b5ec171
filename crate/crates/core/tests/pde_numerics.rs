use num_complex::Complex64 as C64;

use gie_lab::pde::{
    bohmian_velocity, evolve, gaussian_product, superposition_product, BohmianConfig, Fft2, Grid1D, OracleModel,
    OracleParams, VelocityField, Wavefunction2D,
};

fn free_params(grid: &Grid1D, dt: f64, steps: usize) -> OracleParams {
    let n = grid.n();
    let mut p = OracleParams::dimensionless(grid, OracleModel::SeparableGeneric { v1: vec![0.0; n], v2: vec![0.0; n] });
    p.dt = dt;
    p.steps = steps;
    p.sample_every = steps;
    p
}

fn width(grid: &Grid1D, marginal: &[f64]) -> f64 {
    let total: f64 = marginal.iter().sum();
    let mean: f64 = marginal.iter().enumerate().map(|(i, p)| grid.x(i) * p).sum::<f64>() / total;
    let var: f64 = marginal.iter().enumerate().map(|(i, p)| (grid.x(i) - mean).powi(2) * p).sum::<f64>() / total;
    var.sqrt()
}

#[test]
fn free_gaussian_follows_width_law() {
    let grid = Grid1D::new(256, 16.0).unwrap();
    let (s1, s2) = (0.5, 0.8);
    let wf = gaussian_product((-1.0, 2.0), (s1, s2), &grid).unwrap();
    let t = 2.0;
    let run = evolve(&wf, &free_params(&grid, 1e-3, 2000), None).unwrap();
    let law = |s0: f64| s0 * (1.0 + (t / (2.0 * s0 * s0)).powi(2)).sqrt();
    let w1 = width(&grid, &run.final_wf.marginal1());
    let w2 = width(&grid, &run.final_wf.marginal2());
    assert!((w1 / law(s1) - 1.0).abs() < 0.01, "{w1} vs {}", law(s1));
    assert!((w2 / law(s2) - 1.0).abs() < 0.01, "{w2} vs {}", law(s2));
    assert!(run.max_norm_error() < 1e-10);
}

/// Gaussian with a chirp `exp(iβx₁²/2)`: the guidance field is
/// `v₁ = βx₁`, so `X₁(t) = X₁(0)·exp(βt)` exactly.
fn chirped(beta: f64) -> Wavefunction2D {
    let grid = Grid1D::new(256, 16.0).unwrap();
    let mut wf = gaussian_product((0.0, 0.0), (1.0, 1.0), &grid).unwrap();
    wf.apply_local_phases(|x| 0.5 * beta * x * x, |_| 0.0);
    wf
}

#[test]
fn rk4_converges_at_fourth_order() {
    let beta = 0.5;
    let wf = chirped(beta);
    let mut fft = Fft2::new(256);
    let field = VelocityField::new(&mut fft, &wf, 1.0, 1.0, 1.0);
    let x0 = 0.8;
    let t_end = 2.0;
    let exact = x0 * (beta * t_end).exp();
    let error = |dt: f64| {
        let steps = (t_end / dt).round() as usize;
        let mut c = BohmianConfig::new(x0, 0.1);
        for _ in 0..steps {
            c = field.rk4(&c, dt).unwrap();
        }
        (c.x1 - exact).abs()
    };
    let (e1, e2) = (error(0.2), error(0.1));
    let ratio = e1 / e2;
    assert!((13.0..19.0).contains(&ratio), "errors {e1:e} {e2:e} ratio {ratio}");
}

#[test]
fn spectral_velocity_matches_finite_differences() {
    // Entangled superposition with momenta, evaluated analytically.
    let g = |x: f64, c: f64| (-(x - c).powi(2) / 4.0).exp();
    let psi = |x1: f64, x2: f64| {
        C64::from_polar(g(x1, -1.0) * g(x2, 1.5), 0.7 * x1)
            + C64::from_polar(0.8 * g(x1, 1.0) * g(x2, -0.5), -0.4 * x2 + 0.3 * x1)
    };
    let grid = Grid1D::new(256, 16.0).unwrap();
    let mut wf = Wavefunction2D::from_fn(grid, psi);
    wf.normalize().unwrap();
    let h = 1e-5;
    for (a, b) in [(120, 130), (128, 128), (136, 120), (110, 140)] {
        let (x1, x2) = (grid.x(a), grid.x(b));
        let p = psi(x1, x2);
        let fd1 = ((psi(x1 + h, x2) - psi(x1 - h, x2)) / (2.0 * h) / p).im;
        let fd2 = ((psi(x1, x2 + h) - psi(x1, x2 - h)) / (2.0 * h) / p).im;
        let (v1, v2) = bohmian_velocity(&wf, &BohmianConfig::new(x1, x2), 1.0, (1.0, 1.0)).unwrap();
        assert!((v1 - fd1).abs() < 1e-4 && (v2 - fd2).abs() < 1e-4, "({v1}, {v2}) vs ({fd1}, {fd2})");
    }
}

#[test]
fn norm_is_conserved_under_interaction() {
    let grid = Grid1D::new(128, 16.0).unwrap();
    let wf = superposition_product([-4.5, -1.5], [1.5, 4.5], 0.7, &grid).unwrap();
    for model in [OracleModel::Newton, OracleModel::NewtonSchrodinger] {
        let mut p = OracleParams::dimensionless(&grid, model);
        p.steps = 300;
        let run = evolve(&wf, &p, None).unwrap();
        assert!(run.max_norm_error() < 1e-10, "{}", run.max_norm_error());
    }
}
