use std::{env, path::Path};

// The netlib backend links `-lcblas`, which some distros ship only inside
// libopenblas. Expose it under the expected name if no standalone copy exists.
fn main() {
    let libdirs = ["/usr/lib/x86_64-linux-gnu", "/usr/lib64", "/usr/lib"];
    let has_cblas = libdirs.iter().any(|d| Path::new(d).join("libcblas.so").exists());
    if has_cblas {
        return;
    }
    if let Some(openblas) = libdirs
        .iter()
        .map(|d| Path::new(d).join("libopenblas.so"))
        .find(|p| p.exists())
    {
        let out = env::var("OUT_DIR").unwrap();
        let shim = Path::new(&out).join("libcblas.so");
        if !shim.exists() {
            std::os::unix::fs::symlink(&openblas, &shim).unwrap();
        }
        println!("cargo:rustc-link-search=native={out}");
    }
    println!("cargo:rerun-if-changed=build.rs");
}
