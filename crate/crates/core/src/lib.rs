//! Exact and numeric spectral analysis of non-Hermitian Hamiltonians on
//! discrete loop graphs.
//!
//! The graph family (see [`lattice`]) couples two outer chains of `K` sites
//! through a `2L`-site loop; the Hamiltonian ([`hamiltonian`]) carries three
//! real couplings `g`, `h`, `z`. The secular polynomial is computed exactly
//! ([`polyring`]), split into its two reflection sectors ([`secular`]) and
//! checked against known closed forms ([`paperdata`]). Numeric spectra
//! ([`spectra`]) drive reality-domain scans and boundary searches
//! ([`domainscan`]).

pub mod domainscan;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod paperdata;
pub mod polyring;
pub mod secular;
pub mod spectra;

pub use error::{Error, Result};
