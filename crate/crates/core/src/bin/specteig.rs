use std::io::Write;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // unlocked handles: worker threads log to stderr while a command runs
    let code = specteig::cli::run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    let _ = std::io::stdout().flush();
    std::process::exit(code);
}
