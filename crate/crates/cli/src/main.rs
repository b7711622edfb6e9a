use std::io;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SHAPESIG_LOG", "warn")).init();
    let code = shapesig_cli::run_command(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
