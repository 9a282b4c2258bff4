//! Symmetric 12-point triangle rule, exact for polynomials of total degree 6.
//!
//! Points are in barycentric coordinates; weights sum to 1 and are multiplied by
//! the triangle area at use. Every point lies strictly inside the triangle.

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrates `g(x, y)` over the reference triangle `(0,0), (1,0), (0,1)`.
    pub fn integrate_reference(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        0.5 * self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(b, w)| w * g(b[1], b[2]))
            .sum::<f64>()
    }
}

// Orbit generators refined to 25 digits by Newton iteration on the moment equations.
const W_A: f64 = 0.116_786_275_726_379_159_661_207_4;
const A: f64 = 0.501_426_509_658_178_903_419_460_6;
const B: f64 = 0.249_286_745_170_910_548_290_269_7;
const W_C: f64 = 0.050_844_906_370_206_753_299_567_07;
const C: f64 = 0.873_821_971_016_995_636_555_621_1;
const D: f64 = 0.063_089_014_491_502_181_722_189_46;
const W_P: f64 = 0.082_851_075_618_373_710_186_279_42;
const P: f64 = 0.053_145_049_844_817_033_239_222_97;
const Q: f64 = 0.310_352_451_033_784_272_672_112_8;
const R: f64 = 0.636_502_499_121_398_694_088_664_2;

pub fn quadrature_rule() -> QuadratureRule {
    let points = vec![
        [A, B, B],
        [B, A, B],
        [B, B, A],
        [C, D, D],
        [D, C, D],
        [D, D, C],
        [P, Q, R],
        [P, R, Q],
        [Q, P, R],
        [Q, R, P],
        [R, P, Q],
        [R, Q, P],
    ];
    let weights = [[W_A; 3].as_slice(), &[W_C; 3], &[W_P; 6]].concat();
    QuadratureRule { points, weights }
}
