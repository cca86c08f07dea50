#ifndef NOTMF_MODEL_ARCHIVE_HPP
#define NOTMF_MODEL_ARCHIVE_HPP

#include <string>

#include "notmf/model.hpp"

namespace notmf {

// Binary model archive: magic + version header, the configuration, shape
// headers, then W, X, A in row-major order, the objective trace, and the
// optional standardization vectors. Round-trips bit-exactly.
void save_model(const FactorModel& model, const std::string& path);
FactorModel load_model(const std::string& path);

}  // namespace notmf

#endif
