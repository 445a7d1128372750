#include "mqttids/cli.hpp"

int main(int argc, char** argv) { return mqttids::cli::run(argc, argv); }
