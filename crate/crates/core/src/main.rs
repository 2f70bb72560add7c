use std::io::{stderr, stdout};

fn main() {
    // NORMS_THREADS caps the worker pool; rayon picks the available
    // parallelism otherwise.
    if let Some(n) = std::env::var("NORMS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let code = cesaro_copson::cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
