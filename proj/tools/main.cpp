#include "ncfcav/cli.hpp"

int main(int argc, char **argv)
{
    return ncfcav::run_cli(argc, argv);
}
