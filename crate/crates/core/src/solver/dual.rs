use super::newton::Solution;
use crate::potential::{PLConvexPotential, Piece};

/// Legendre transform `φ(y) = maxₖ (xₖ·y − ψ(xₖ))` over the vertices `xₖ` of
/// the cell subdivision of `U₁`; exact for the restriction of ψ to `U₁`.
pub fn legendre_dual(sol: &Solution) -> PLConvexPotential<f64> {
    let pieces = sol.diagram.vertices().into_iter().map(|x| Piece { slope: x, intercept: sol.potential.value(x) }).collect();
    PLConvexPotential::new(pieces, sol.cloud.domain.clone())
}
