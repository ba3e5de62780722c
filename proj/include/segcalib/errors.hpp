// Copyright 2026 The segcalib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace segcalib
{

/// Base of every error raised by the library. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class CloudTooSmall : public Error
{
public:
  using Error::Error;
};

class DimensionMismatch : public Error
{
public:
  using Error::Error;
};

class EmptyMaskSet : public Error
{
public:
  using Error::Error;
};

/// No point of the cloud lands inside any mask under the candidate extrinsic.
class NoOverlap : public Error
{
public:
  using Error::Error;
};

class InvalidSpec : public Error
{
public:
  using Error::Error;
};

class EmptyInput : public Error
{
public:
  using Error::Error;
};

/// Malformed file content or unreadable path.
class IoError : public Error
{
public:
  using Error::Error;
};

/// Configuration document failed schema validation.
class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace segcalib
