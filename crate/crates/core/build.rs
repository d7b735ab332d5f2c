use std::process::Command;

fn git(args: &[&str]) -> Option<String> {
    let out = Command::new("git").args(args).output().ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .filter(|s| !s.is_empty())
}

fn main() {
    let version = std::env::var("CARGO_PKG_VERSION").unwrap_or_default();
    let id = match git(&["rev-parse", "--short=12", "HEAD"]) {
        Some(hash) => format!("{version}+g{hash}"),
        None => version,
    };
    if let Some(dir) = git(&["rev-parse", "--absolute-git-dir"]) {
        println!("cargo:rerun-if-changed={dir}/HEAD");
        println!("cargo:rerun-if-changed={dir}/refs");
    }
    println!("cargo:rerun-if-env-changed=DIRLP_BUILD_ID");
    let id = std::env::var("DIRLP_BUILD_ID").unwrap_or(id);
    println!("cargo:rustc-env=DIRLP_BUILD_ID={id}");
}
