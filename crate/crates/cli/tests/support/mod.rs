//! Independent oracles for the acceptance suite: fixed-order Gauss-Legendre
//! quadrature (no shared code with the library's adaptive Gauss-Kronrod
//! integrator), a brute-force splitting enumerator, and small helpers.

use wpsys_core::splitting::SplittingClass;

/// Legendre polynomial value and derivative at `x` by the three-term
/// recurrence.
fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut previous = 1.0f64;
    let mut current = x;
    for k in 2..=order {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * current - (k - 1.0) * previous) / k;
        previous = current;
        current = next;
    }
    let derivative = order as f64 * (x * current - previous) / (x * x - 1.0);
    (current, derivative)
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `(-1, 1)`,
/// found by Newton iteration from the Chebyshev initial guess.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (value, derivative) = legendre(order, x);
            let step = value / derivative;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, derivative) = legendre(order, x);
        let weight = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = weight;
        weights[order - 1 - i] = weight;
    }
    let total: f64 = weights.iter().sum();
    assert!((total - 2.0).abs() < 1e-13, "weights sum to {total}");
    (nodes, weights)
}

/// Composite fixed-grid quadrature of `f` over `[a, b]`: `panels` panels,
/// each integrated with the `order`-point Gauss-Legendre rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for panel in 0..panels {
        let lo = a + panel as f64 * width;
        let center = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut panel_sum = 0.0;
        for (&node, &weight) in nodes.iter().zip(&weights) {
            panel_sum += weight * f(center + half * node);
        }
        total += half * panel_sum;
    }
    total
}

/// Tensor-product version over `[a, b]^2`.
pub fn integrate_gl_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> f64 {
    integrate_gl(
        |x| integrate_gl(|y| f(x, y), a, b, panels, order),
        a,
        b,
        panels,
        order,
    )
}

/// Captured result of one CLI invocation.
pub struct Run {
    pub code: i32,
    pub stdout: String,
}

/// Runs the `wpsys` binary with a clean table environment and captures its
/// exit code and stdout.
pub fn wpsys(args: &[&str]) -> Run {
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_wpsys"))
        .args(args)
        .env_remove("WPSYS_TABLE")
        .output()
        .expect("binary runs");
    Run {
        code: output.status.code().expect("exit code"),
        stdout: String::from_utf8(output.stdout).expect("utf-8 stdout"),
    }
}

/// Path for a scratch file in the per-target temporary directory.
pub fn scratch(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// Every `(g0, k, n0)` with `k >= 1` curves splitting off a piece of
/// complexity `m` from a closed-up `(g, n)` surface, by exhaustive search,
/// sorted lexicographically.
pub fn brute_force_splittings(g: u32, n: u32, m: u32) -> Vec<SplittingClass> {
    let mut found = Vec::new();
    for g0 in 0..=g {
        for k in 1..=(m + 2) {
            for n0 in 0..=n {
                let complexity = 2 * g0 as i64 - 2 + k as i64 + n0 as i64;
                let complement_genus = g as i64 + 1 - g0 as i64 - k as i64;
                if complexity == m as i64 && complement_genus >= 0 {
                    found.push(SplittingClass { g0, k, n0 });
                }
            }
        }
    }
    found.sort_by_key(|class| (class.g0, class.k, class.n0));
    found
}
