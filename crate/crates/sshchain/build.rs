// blas-sys/lapack-sys declare externs but leave implementation selection to
// the consumer; link the system libraries here (Debian alternatives).
fn main() {
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
