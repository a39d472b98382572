use std::path::Path;

/// The netlib system backend always links `-lcblas`, but some distributions
/// ship the CBLAS interface inside libopenblas instead of a standalone
/// libcblas. When that is the case, expose a `libcblas.so` symlink from
/// OUT_DIR so the link succeeds; the runtime SONAME resolves to openblas.
fn main() {
    println!("cargo:rerun-if-changed=build.rs");
    let libdirs = ["/usr/lib/x86_64-linux-gnu", "/usr/lib", "/usr/lib64"];
    let has_cblas = libdirs
        .iter()
        .any(|d| Path::new(d).join("libcblas.so").exists());
    if has_cblas {
        return;
    }
    let Some(openblas) = libdirs
        .iter()
        .map(|d| Path::new(d).join("libopenblas.so"))
        .find(|p| p.exists())
    else {
        return;
    };
    let out_dir = std::env::var("OUT_DIR").expect("OUT_DIR not set");
    let shim = Path::new(&out_dir).join("libcblas.so");
    if !shim.exists() {
        std::os::unix::fs::symlink(&openblas, &shim).expect("cannot create cblas shim");
    }
    println!("cargo:rustc-link-search=native={out_dir}");
}
