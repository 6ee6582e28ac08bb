# Copyright 2023 c0fec0de
#
# This file is part of fracspde.
#
# fracspde is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# fracspde is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with fracspde. If not, see <https://www.gnu.org/licenses/>.

"""Refined :any:`pydantic.BaseModel`."""
from typing import Any, Dict

import pydantic

from ._stringconverter import StringConverter


class BaseModel(pydantic.BaseModel):
    """
    Refined :any:`pydantic.BaseModel`.

    * Data Models are immutable.
    * Unknown fields are rejected.
    * The ``repr`` implementation skips fields, which are identical to their default value.
    * ``model_copy`` validates the updated instance.
    """

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    def __repr_args__(self: pydantic.BaseModel):
        fields = type(self).model_fields
        return [
            (key, value)
            for key, value in self.__dict__.items()
            if key not in fields or fields[key].is_required() or value != fields[key].default
        ]

    def model_copy(self, *, update=None, **kwargs):
        if not update:
            return super().model_copy(**kwargs)
        data = self.model_dump(by_alias=False)
        data.update(update)
        return self.model_validate(data)

    def model_copy_fromstr(self, kwargs: Dict[str, Any]):
        """Create new instance with updated arguments given as strings."""
        converter = StringConverter(properties=self.model_json_schema(by_alias=False)["properties"])
        update = {}
        for name, value in kwargs.items():
            update[name] = converter(name, value)
        return self.model_copy(update=update)
