//! Exact arithmetic: 𝔽_p, monomials and orders, sparse polynomials, and
//! univariate factorization.

mod field;
mod monomial;
mod parse;
mod poly;
mod univariate;

pub use field::{Coef, PrimeField};
pub use monomial::{Monomial, MonomialOrder, OrderKind, MAX_VARS};
pub use parse::parse_poly;
pub use poly::{poly_arith, same_ring, ArithOp, Poly, PolyRing, Term};
pub(crate) use poly::add_scaled;
pub use univariate::{square_free_part, univariate_factor, Factorization};
