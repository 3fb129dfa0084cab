#ifndef SHARPK_HPP
#define SHARPK_HPP

#include "sharpk/accumulate.hpp"
#include "sharpk/certify.hpp"
#include "sharpk/errors.hpp"
#include "sharpk/fields.hpp"
#include "sharpk/kernel.hpp"
#include "sharpk/lattice.hpp"
#include "sharpk/parallel.hpp"
#include "sharpk/report.hpp"
#include "sharpk/sums.hpp"
#include "sharpk/tail.hpp"

#endif // SHARPK_HPP
