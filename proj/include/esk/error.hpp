#pragma once

#include <stdexcept>
#include <string>

namespace esk {

// Base class for all library errors. Subtypes map onto the CLI exit codes:
// data/usage problems exit 2, sketch compatibility problems exit 3.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// weight or rate is not strictly positive
class invalid_weight_error : public error {
public:
  using error::error;
};

// node id 0 is reserved for the empty-edge sentinel
class reserved_id_error : public error {
public:
  using error::error;
};

// position index outside 1..m
class index_error : public error {
public:
  using error::error;
};

// API contract broken (e.g. permutation positions consumed out of order)
class contract_error : public error {
public:
  using error::error;
};

// sketches or stores with mismatched m / salt / mode, or evidence of
// uncoordinated construction discovered during a merge
class incompatible_sketch_error : public error {
public:
  using error::error;
};

class missing_node_error : public error {
public:
  using error::error;
};

// estimator asked for data the sketch does not contain (all cells empty)
class no_data_error : public error {
public:
  using error::error;
};

// bad configuration value (m too small, odd m for split-half, bad alpha, ...)
class invalid_config_error : public error {
public:
  using error::error;
};

// operation not defined for the store's configuration
// (self-loops in edge counting, directed stores in volume/louvain)
class unsupported_error : public error {
public:
  using error::error;
};

// malformed input file; message carries the line number
class parse_error : public error {
public:
  using error::error;
};

class corrupt_file_error : public error {
public:
  using error::error;
};

// cached gain inputs were taken before a later move invalidated them
class stale_cache_error : public error {
public:
  using error::error;
};

}  // namespace esk
