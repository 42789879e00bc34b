//! Command implementations behind the `nlslab` binary. Everything the
//! binary does is callable as a library function, which is how the
//! integration and acceptance suites drive it.

pub mod commands;
pub mod output;
pub mod sweep;
pub mod verify;

/// Exit-code taxonomy, fixed so CI can tell parse, numerical and I/O
/// failures apart.
pub mod exit_codes {
    pub const SUCCESS: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 4;
    pub const IO: i32 = 5;
    pub const CAP_EXCEEDED: i32 = 6;
}
