fn main() {
    if let Some(threads) = std::env::var("HODGEQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        #[cfg(feature = "parallel")]
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
        #[cfg(not(feature = "parallel"))]
        let _ = threads;
    }
    std::process::exit(hodgeq_cli::run_from(std::env::args_os()));
}
