//! External commands consulted during extraction, such as a font matcher or
//! an OCR engine. Each receives the path of a PNG patch as its last argument
//! and answers on stdout.

use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use image::RgbaImage;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalCommand {
    pub program: String,
    #[serde(default)]
    pub args: Vec<String>,
}

static NEXT: AtomicU64 = AtomicU64::new(0);

impl ExternalCommand {
    /// Trimmed stdout of a successful run, or `None` on any failure or an
    /// empty answer.
    pub fn run_on_png(&self, patch: &RgbaImage) -> Option<String> {
        let n = NEXT.fetch_add(1, Ordering::Relaxed);
        let path = std::env::temp_dir().join(format!("timeline-kit-{}-{n}.png", std::process::id()));
        patch.save(&path).ok()?;
        let out = Command::new(&self.program).args(&self.args).arg(&path).output();
        let _ = std::fs::remove_file(&path);
        let out = out.ok().filter(|o| o.status.success())?;
        let text = String::from_utf8_lossy(&out.stdout).trim().to_string();
        (!text.is_empty()).then_some(text)
    }
}
