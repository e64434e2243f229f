#pragma once

#include <cstdint>
#include <vector>

namespace a2er {

// One stored datum. `z` is the model feature captured when the record first
// left the FIFO stage; it stays empty while the record only lives in the FIFO.
// Target convention: regression stores the scalar target in y[0]; classification
// stores the class index in y[0].
struct Record {
    std::int64_t id = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    double gamma_bar = 1.0;  // replay priority in [0, 1]; new data enters at 1
};

}  // namespace a2er
