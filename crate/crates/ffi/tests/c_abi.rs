//! Compiles a C program against the generated header and, when the static
//! library is present in the target directory, links and runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn target_profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    let include = crate_dir().join("include");
    let src = crate_dir().join("tests").join("c_program.c");
    for (lang, std) in [("c", "-std=c99"), ("c++", "-std=c++11")] {
        let out = Command::new("cc")
            .args(["-x", lang, std, "-Wall", "-Werror", "-fsyntax-only", "-I"])
            .arg(&include)
            .arg(&src)
            .output()
            .unwrap();
        assert!(out.status.success(), "{lang}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_profile_dir().join("libswe_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("cc or {} not available, skipping", lib.display());
        return;
    }
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = tmp.join("swe_c_program");
    let out = Command::new("cc")
        .args(["-std=c99", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests").join("c_program.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "exit {:?}: {stdout}", run.status.code());
    let fields: Vec<&str> = stdout.split_whitespace().collect();
    assert_eq!(fields[0], "10");
    assert_eq!(fields[1], "17");
}
