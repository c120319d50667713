//! Compiles and runs the C example against the freshly built shared
//! library, proving the header and the ABI agree end to end.

use std::path::PathBuf;
use std::process::Command;

fn target_debug_dirs() -> Vec<PathBuf> {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    vec![target.join("debug"), target.join("debug/deps")]
}

#[test]
fn c_demo_builds_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dirs = target_debug_dirs();
    let lib_dir = dirs
        .iter()
        .find(|d| d.join("libcollision_sim_ffi.so").is_file())
        .or_else(|| {
            dirs.iter()
                .find(|d| d.join("libcollision_sim_ffi.dylib").is_file())
        });
    let Some(lib_dir) = lib_dir else {
        panic!("shared library not found under {dirs:?}; build the cdylib first");
    };

    let out = tempfile::tempdir().unwrap();
    let binary = out.path().join("demo");
    let compile = Command::new("cc")
        .arg(manifest.join("examples/demo.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(lib_dir)
        .args(["-lcollision_sim_ffi", "-lm", "-o"])
        .arg(&binary)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "cc failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&binary)
        .env("LD_LIBRARY_PATH", lib_dir)
        .output()
        .expect("demo runs");
    assert!(
        run.status.success(),
        "demo exited with {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        stdout.contains("i2_s_m = ") && stdout.contains("i3 = "),
        "unexpected demo output: {stdout}"
    );
}
