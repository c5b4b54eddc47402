#include "runner.hpp"

int main(int argc, char** argv) {
  return flatdyn::runner::run_cli(argc, argv);
}
