use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Ok(threads) = std::env::var("WIDTHS_LAB_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let (code, out) = widths_cli::run(&args);
    std::io::stdout().write_all(&out).expect("stdout");
    std::process::exit(code);
}
