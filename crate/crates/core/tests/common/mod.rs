//! Shared oracles for the integration tests. Everything here is an
//! independent route to quantities the library computes spectrally, used to
//! freeze expected values: a Dormand-Prince 5(4) integrator for the per-mode
//! ODE and a dense direct quadrature for weakly singular convolutions.

#![allow(dead_code)]

use flp_core::C64;

/// RHS of the spectral ODE as a first-order system:
/// y = (eta_hat, eta_hat_t),
/// y' = (y1, -(2iU y1 + (k^4 - U^2 k) y0) k/(k+1)).
fn rhs(k: f64, u: f64, y: [C64; 2]) -> [C64; 2] {
    let coeff = k / (k + 1.0);
    let acc = -(y[1] * C64::new(0.0, 2.0 * u) + y[0] * (k.powi(4) - u * u * k)) * coeff;
    [y[1], acc]
}

/// Second initial condition of the spectral problem solved for eta_hat_t(0):
/// eta_hat_t(0) = -i eta0_hat (k^3 + k U^2)/(2U).
pub fn initial_slope(k: f64, u: f64, eta0_hat: C64) -> C64 {
    -C64::new(0.0, 1.0) * eta0_hat * ((k.powi(3) + k * u * u) / (2.0 * u))
}

/// Adaptive Dormand-Prince 5(4) integration of the mode ODE, reporting
/// (eta_hat, eta_hat_t) at each requested target time (ascending, from 0).
pub fn mol_mode_trajectory(
    k: f64,
    u: f64,
    eta0_hat: C64,
    t_targets: &[f64],
    tol: f64,
) -> Vec<(C64, C64)> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut out = Vec::with_capacity(t_targets.len());
    let mut t = 0.0f64;
    let mut y = [eta0_hat, initial_slope(k, u, eta0_hat)];
    // step scale set by the oscillation frequency ~ k^2
    let mut h = (0.1 / (1.0 + k * k)).min(0.05).max(1e-8);
    for &target in t_targets {
        assert!(target >= t, "targets must be ascending");
        if target == 0.0 {
            out.push((y[0], y[1]));
            continue;
        }
        while t < target {
            let hs = h.min(target - t);
            let k1 = rhs(k, u, y);
            let mut stages: Vec<[C64; 2]> = vec![k1];
            for s in 0..6 {
                let mut ys = y;
                for (j, st) in stages.iter().enumerate() {
                    ys[0] += st[0] * (A[s][j] * hs);
                    ys[1] += st[1] * (A[s][j] * hs);
                }
                stages.push(rhs(k, u, ys));
            }
            let mut y5 = y;
            let mut y4 = y;
            for (j, st) in stages.iter().enumerate() {
                y5[0] += st[0] * (B5[j] * hs);
                y5[1] += st[1] * (B5[j] * hs);
                y4[0] += st[0] * (B4[j] * hs);
                y4[1] += st[1] * (B4[j] * hs);
            }
            let scale = tol * (1.0 + y[0].norm() + y[1].norm() / (1.0 + k * k));
            let err = ((y5[0] - y4[0]).norm() + (y5[1] - y4[1]).norm() / (1.0 + k * k)) / scale;
            if err <= 1.0 {
                t += hs;
                y = y5;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h = (hs * fac).max(1e-10);
        }
        out.push((y[0], y[1]));
    }
    out
}

/// Dense direct quadrature of `int_0^t kernel(t - tau) theta(tau) d tau`
/// where `kernel(s) = kappa(s)/sqrt(s)` with smooth `kappa`: substitute
/// `s = u^2` to remove the singularity, then integrate with a fine composite
/// Simpson rule.
pub fn convolution_bruteforce<K, Th>(kappa: &K, theta: &Th, t: f64, n: usize) -> C64
where
    K: Fn(f64) -> C64,
    Th: Fn(f64) -> C64,
{
    // int_0^t kappa(s) theta(t - s) s^{-1/2} ds = 2 int_0^{sqrt t} kappa(u^2) theta(t - u^2) du
    let m = if n % 2 == 0 { n } else { n + 1 };
    let h = t.sqrt() / m as f64;
    let f = |u: f64| kappa(u * u) * theta(t - u * u);
    let mut acc = f(0.0) + f(t.sqrt());
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(i as f64 * h) * w;
    }
    acc * (2.0 * h / 3.0)
}
