#include "gofperm/io.hpp"

namespace gofperm {

namespace {

// Monthly steam usage (pounds), operating days per month and mean
// atmospheric temperature (deg F); 25 months, Draper & Smith.
constexpr std::string_view kSteamCsv =
    "steam,days,temperature\n"
    "10.98,20,35.3\n"
    "11.13,20,29.7\n"
    "12.51,23,30.8\n"
    "8.40,20,58.8\n"
    "9.27,21,61.4\n"
    "8.73,22,71.3\n"
    "6.36,11,74.4\n"
    "8.50,23,76.7\n"
    "7.82,21,70.7\n"
    "9.14,20,57.5\n"
    "8.24,20,46.4\n"
    "12.19,21,28.9\n"
    "11.88,21,28.1\n"
    "9.57,19,39.1\n"
    "10.94,23,46.8\n"
    "9.58,20,48.5\n"
    "10.09,22,59.3\n"
    "8.11,22,70.0\n"
    "6.83,11,70.0\n"
    "8.88,23,74.5\n"
    "7.68,20,72.1\n"
    "8.47,21,58.1\n"
    "8.86,20,44.6\n"
    "10.36,20,33.4\n"
    "11.08,22,28.6\n";

}  // namespace

std::vector<std::string> bundled_dataset_names() { return {"steam"}; }

std::string_view bundled_dataset(const std::string& name) {
    if (name == "steam") return kSteamCsv;
    throw Error(ErrorKind::InvalidArgument, "no bundled dataset named '" + name + "' (available: steam)");
}

}  // namespace gofperm
