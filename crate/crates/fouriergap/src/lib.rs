//! Numerical toolkit around two extremal problems in Fourier analysis and
//! their consequences for prime gaps: evaluable functionals over
//! function/transform pairs, closed-form test-function families, dual
//! witnesses with certified sup norms, bound tables, a segmented prime sieve
//! with gap verifiers, and a Mellin-kernel explicit formula checked against
//! tables of Riemann zeta zeros.

pub mod alpha;
pub mod bounds;
pub mod explicit;
pub mod families;
pub mod fourier;
pub mod optim;
pub mod primes;
pub mod quad;
pub mod roots;
pub mod sici;
pub mod witness;

pub use fourier::{AParam, FourierPair, FunctionalReport, Mode};
pub use quad::{Integral, QuadratureSpec};
