//! Compiles `tests/c/smoke.c` against the generated header and the static
//! library. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

/// `cargo test` builds only the rlib, so ask cargo for the static library.
fn static_lib() -> Option<PathBuf> {
    let built = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "-p", "condquant-ffi"])
        .args((!cfg!(debug_assertions)).then_some("--release"))
        .status()
        .ok()?;
    if !built.success() {
        return None;
    }
    // Test binaries live in target/<profile>/deps; the library is one level up.
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libcondquant_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler `{cc}`");
        return;
    }
    let Some(lib) = static_lib() else {
        eprintln!("skipping: libcondquant_ffi.a not built");
        return;
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 1 3\n");
}
