#include "uowc/app/cli.hpp"

int main(int argc, char** argv) { return uowc::app::run(argc, argv); }
