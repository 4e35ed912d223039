fn main() {
    std::process::exit(quantized_walk::cli::main_with_args(std::env::args_os()));
}
