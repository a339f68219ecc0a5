#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lorentz/curves.hpp"
#include "lorentz/spacetime.hpp"
#include "lorentz/transport.hpp"

namespace lorentz {

// Spacetime file format (structured text, '#' comments):
//
//   spacetime v1
//   n <count>
//   [dim <d>]
//   [coords]           # n lines of d reals
//   weights            # one line of n reals (or n lines of one)
//   ell                # triples "i j value" or "i j -inf" until "end";
//   ...                # unlisted pairs default to -inf off-diagonal, 0 on
//   end
//
// or a generator stanza instead of the weights/ell blocks:
//
//   spacetime v1
//   generator minkowski | hyperbolic_lp <p>
//   extent <lo0> <hi0> ... per axis
//   resolution <r0> ...
//
// Mode (a) round-trips losslessly (17 significant digits).
DiscreteSpacetime read_spacetime(std::istream& in);
DiscreteSpacetime read_spacetime_file(const std::string& path);
void write_spacetime(std::ostream& out, const DiscreteSpacetime& st);
std::string spacetime_to_string(const DiscreteSpacetime& st);

// Measure file: lines "point-index weight".
DiscreteMeasure read_measure(std::istream& in, int n_points);
DiscreteMeasure read_measure_file(const std::string& path, int n_points);
void write_measure(std::ostream& out, const DiscreteMeasure& mu);

// Path file: lines "t point-index" (discrete) or "t x0 x1 ..." (continuum).
struct PathData {
    std::vector<double> times;
    std::vector<int> points;       // discrete form
    std::vector<Vec> coords;       // continuum form
    bool continuum = false;
};
PathData read_path(std::istream& in);
PathData read_path_file(const std::string& path);

/// CSV with LF line endings, '.' decimal separator, 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(&out) {}
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& cells);
    static std::string format(double v);

private:
    std::ostream* out_;
};

std::string format_double(double v);  // shortest 17-significant-digit form

}  // namespace lorentz
