//! Heat-kernel differential forms on spaces of metrised ribbon graphs.

pub mod ainfinity;
pub mod algebra;
pub mod battery;
pub mod forms;
pub mod linalg;
pub mod network;
pub mod partition;
pub mod poly;
pub mod quadrature;
pub mod ribbon;
pub mod spectral;

pub use algebra::{builtins, AlgebraError, AlgebraFile, CyAlgebra, Residual, ValidationReport};
pub use ribbon::{DetTrivialization, GraphError, Length, RibbonGraph};
pub use spectral::{Kernel2, Spectral, SpectralError, Time};
