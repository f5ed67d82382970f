fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("cargo:rerun-if-changed=build.rs");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    #[cfg(feature = "gen-header")]
    {
        let crate_dir = std::env::var("CARGO_MANIFEST_DIR")?;
        let config = cbindgen::Config::from_root_or_default(&crate_dir);
        cbindgen::Builder::new()
            .with_crate(&crate_dir)
            .with_config(config)
            .generate()?
            .write_to_file(format!("{crate_dir}/include/splitpoint.h"));
    }

    Ok(())
}
