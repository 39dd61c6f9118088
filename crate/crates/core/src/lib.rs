//! Large-universe attribute-based encryption from lattices.
//!
//! A key is issued for an access policy such as `doctor AND (cardiology OR
//! admin)`; a ciphertext is labeled with a set of attribute strings and
//! decrypts exactly when that set satisfies the policy. Any string can be
//! an attribute, and attributes need not exist at setup.
//!
//! Layers, bottom up:
//!
//! * [`zq`]: arithmetic and linear algebra over `Z_q`.
//! * [`gauss`]: seeded randomness, the discrete Gaussian over `Z`, and the
//!   LWE error distribution.
//! * [`trapdoor`]: trapdoor generation, preimage sampling and basis
//!   extension.
//! * [`lsss`]: the policy language and linear secret sharing.
//! * [`abe`]: the scheme itself.
//! * [`encoding`]: the binary file format.
//!
//! With the default `parallel` feature, key generation, byte-level
//! encryption and some matrix products fan out over rayon. Without it
//! everything runs on the calling thread and produces identical output.

pub mod abe;
pub mod encoding;
pub mod error;
pub mod gauss;
pub mod lsss;
pub mod par;
pub mod trapdoor;
pub mod zq;

pub use abe::{
    decrypt, decrypt_bytes, encrypt, encrypt_bytes, keygen, noise_budget_check, select_params, setup,
    Ciphertext, MasterSecretKey, Profile, PublicParams, SystemParams, UserSecretKey,
};
pub use error::{Error, Result};
pub use gauss::RandomSource;
pub use lsss::{compile_lsss, parse_policy, PolicyAst, SharePolicy};
