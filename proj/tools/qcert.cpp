#include "qcert/certify.hpp"

int main(int argc, char** argv)
{
    return qcert::cli_main(argc, argv);
}
