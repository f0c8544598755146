// Golden-value regression. `golden_regression --regenerate` recomputes every quantity and
// rewrites the fixtures file; without flags each quantity must stay within the stored band.
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>

#include "golden.hpp"

int main(int argc, char** argv) {
    const bool regenerate = argc > 1 && std::strcmp(argv[1], "--regenerate") == 0;
    const std::string path = argc > 2 ? argv[2] : FOCKLAB_FIXTURES;
    try {
        if (regenerate) {
            golden::Json doc = {{"version", 1}, {"tolerance", 0.2}, {"entries", golden::Json::object()}};
            for (const auto& q : golden::quantities()) {
                const double v = q.compute();
                std::printf("%-36s %.16e\n", q.name.c_str(), v);
                doc["entries"][q.name] = {{"value", v}, {"config", q.config}};
            }
            std::ofstream(path) << doc.dump(2) << '\n';
            std::printf("wrote %s\n", path.c_str());
            return 0;
        }
        const golden::Json fixtures = golden::load(path);
        const double tol = golden::tolerance(fixtures);
        int failures = 0;
        std::map<std::string, double> seen;
        for (const auto& q : golden::quantities()) {
            const double ref = golden::stored(fixtures, q.name);
            const double v = q.compute();
            seen[q.name] = v;
            const bool ok = std::abs(v - ref) <= tol * std::abs(ref);
            failures += !ok;
            std::printf("%s %-36s value %.6e golden %.6e\n", ok ? "PASS" : "FAIL", q.name.c_str(), v, ref);
        }
        // The Bernstein constant must not drift when N doubles.
        const double drift = seen["bernstein_N80"] / seen["bernstein_N40"];
        const bool stable = std::abs(drift - 1.0) <= tol;
        failures += !stable;
        std::printf("%s %-36s N80/N40 = %.6f\n", stable ? "PASS" : "FAIL", "bernstein_doubling", drift);
        return failures == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "golden_regression: " << e.what() << '\n';
        return 1;
    }
}
