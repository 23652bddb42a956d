//! Example matrices used as regression anchors.
//!
//! The 4x4 rotation example is exact (entries built from `sqrt(2)`). In the
//! 6x6 noise example the two systems are exact integers, while the
//! transformation, the transformed systems and the noise matrix are only
//! known to four decimals; tolerances that use them must allow for that.

use crate::matrix::DenseMatrix;

fn dense<const N: usize>(rows: &[[f64; N]; N]) -> DenseMatrix {
    DenseMatrix::from_rows(rows).expect("finite fixture")
}

/// `diag(1, 1, 1, -4)`.
pub fn rotation_a() -> DenseMatrix {
    DenseMatrix::from_diagonal(&[1.0, 1.0, 1.0, -4.0])
}

/// Rotation speeds of the 4x4 example.
pub const ROTATION_LAMBDA: [f64; 2] = [1.0, 2.0];

/// Symplectic orthogonal `U` with `diag(U^T A U) = -1/4` for [`rotation_a`].
pub fn rotation_u() -> DenseMatrix {
    let r = std::f64::consts::SQRT_2;
    dense(&[
        [r, r, 0.0, 0.0],
        [1.0, -1.0, 1.0, -1.0],
        [0.0, 0.0, r, r],
        [-1.0, 1.0, 1.0, -1.0],
    ])
    .scale(0.5)
}

/// `U [[0, L], [-L, 0]] U^T` for `L = diag(1, 2)` and [`rotation_u`].
pub fn rotation_m0_tilde() -> DenseMatrix {
    let r = std::f64::consts::SQRT_2;
    dense(&[
        [0.0, -r, 6.0, -r],
        [r, 0.0, -r, 6.0],
        [-6.0, r, 0.0, -r],
        [r, -6.0, r, 0.0],
    ])
    .scale(0.25)
}

pub const NOISE_OMEGA: [f64; 3] = [1.0, 2.0, 3.0];

pub fn noise_a1() -> DenseMatrix {
    dense(&[
        [-1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        [0.0, 1.0, 0.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn noise_a2() -> DenseMatrix {
    dense(&[
        [1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, -1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 1.0, -1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0, 1.0, -1.0],
        [1.0, 0.0, 0.0, 0.0, 0.0, -6.0],
    ])
}

/// Four-decimal orthogonal `U` bringing both shifted systems to almost hollow form.
pub fn noise_u_printed() -> DenseMatrix {
    dense(&[
        [0.1919, 0.1709, -0.1182, 0.4410, 0.3961, 0.7541],
        [-0.8960, -0.1266, 0.1726, -0.0363, -0.1203, 0.3682],
        [0.0159, -0.6560, -0.1059, -0.3989, 0.6311, 0.0298],
        [0.0144, 0.0086, -0.8175, -0.3556, -0.3660, 0.2664],
        [0.0138, 0.6274, 0.2379, -0.6786, 0.2555, 0.1542],
        [-0.3996, 0.3616, -0.4692, 0.2411, 0.4808, -0.4473],
    ])
}

/// Four-decimal `U^T A1 U`.
pub fn noise_a1_tilde_printed() -> DenseMatrix {
    dense(&[
        [-0.1667, -0.6778, 0.8432, 0.5969, -1.2359, -0.8144],
        [0.3655, -0.1667, -0.1359, 0.0294, -0.0818, -0.4453],
        [0.4809, -0.4877, -0.1667, 1.1305, -1.0531, 0.2396],
        [0.2712, -0.5650, 1.0652, -0.1667, -0.4391, -0.0790],
        [-1.3083, 0.7799, -0.8330, -1.1435, -0.1667, 0.0971],
        [-1.3506, 0.1132, -1.5411, -1.4969, 1.1554, -0.1667],
    ])
}

/// Four-decimal `U^T A2 U`.
pub fn noise_a2_tilde_printed() -> DenseMatrix {
    dense(&[
        [-0.1667, 0.2200, -1.2765, -0.2157, 1.4333, -2.2393],
        [1.4680, -0.1667, 0.8754, -0.9385, -1.5753, 1.6896],
        [-1.5017, 1.5458, -0.1667, -0.2265, 1.1226, -1.9108],
        [0.5741, -0.3164, 0.2973, -0.1667, -0.9509, -0.4748],
        [1.9688, -0.9634, 2.1166, -0.5422, 0.0562, 2.0303],
        [-0.4528, 1.3096, -1.5708, 1.2474, 1.3797, -0.3895],
    ])
}

/// Four-decimal `U M(1, 2, 3) U^T`.
pub fn noise_m_printed() -> DenseMatrix {
    dense(&[
        [0.0, 0.6949, -1.3331, 1.9489, -0.3262, -1.1247],
        [-0.6949, 0.0, -0.2634, 0.1201, -1.1153, -0.6950],
        [1.3331, 0.2634, 0.0, -0.0300, 0.6217, -1.5717],
        [-1.9489, -0.1201, 0.0300, 0.0, 0.9140, -0.6124],
        [0.3262, 1.1153, -0.6217, -0.9140, 0.0, -0.8317],
        [1.1247, 0.6950, 1.5717, 0.6124, 0.8317, 0.0],
    ])
}

/// A named fixture with a one-line note for file headers.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub note: &'static str,
    pub matrix: DenseMatrix,
}

pub fn all() -> Vec<Fixture> {
    let f = |name, note, matrix| Fixture { name, note, matrix };
    vec![
        f("rotation_a", "diag(1, 1, 1, -4); exact", rotation_a()),
        f("rotation_u", "symplectic orthogonal U for rotation_a; exact up to rounding of sqrt(2)/2", rotation_u()),
        f("rotation_m0_tilde", "U [[0, L], [-L, 0]] U^T with L = diag(1, 2); exact up to rounding of sqrt(2)/4", rotation_m0_tilde()),
        f("noise_a1", "first 6x6 system; exact", noise_a1()),
        f("noise_a2", "second 6x6 system; exact", noise_a2()),
        f("noise_u_printed", "common orthogonal U for the 6x6 pair; four decimals", noise_u_printed()),
        f("noise_a1_tilde_printed", "U^T A1 U; four decimals", noise_a1_tilde_printed()),
        f("noise_a2_tilde_printed", "U^T A2 U; four decimals", noise_a2_tilde_printed()),
        f("noise_m_printed", "U M(1, 2, 3) U^T; four decimals", noise_m_printed()),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
