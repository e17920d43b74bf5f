#pragma once

#include "mesonbell/classical.hpp"
#include "mesonbell/dynamics.hpp"
#include "mesonbell/errors.hpp"
#include "mesonbell/inequalities.hpp"
#include "mesonbell/io.hpp"
#include "mesonbell/registry.hpp"
#include "mesonbell/scan.hpp"
#include "mesonbell/species.hpp"
#include "mesonbell/twobody.hpp"
