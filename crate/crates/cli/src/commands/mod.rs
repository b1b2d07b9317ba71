//! One module per subcommand. Each exposes a resolved config type and a
//! `run` returning the exit code plus the exact stdout bytes.

pub mod matrix;
pub mod rates;
pub mod threshold;
pub mod verify;

pub struct Report {
    pub code: i32,
    pub bytes: Vec<u8>,
}

impl Report {
    pub fn ok(bytes: Vec<u8>) -> Report {
        Report { code: 0, bytes }
    }
}
