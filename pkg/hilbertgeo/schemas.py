"""
HilbertLab - Serialization schemas
marshmallow schemas for run configs and representation files.
"""

import math

from marshmallow import RAISE, Schema, ValidationError, fields, validate, validates, validates_schema


class FiniteFloat(fields.Float):
    def __init__(self, **kwargs):
        kwargs.setdefault('allow_nan', False)
        super().__init__(**kwargs)


def _matrix_validator(values):
    """Row-major 3x3 matrix as nine reals"""
    if len(values) != 9:
        raise ValidationError(f'Matrix needs 9 entries, got {len(values)}')
    if not all(math.isfinite(v) for v in values):
        raise ValidationError('Matrix entries must be finite')


# ==================== REPRESENTATIONS ====================

class SplittingSchema(Schema):
    class Meta:
        unknown = RAISE

    kind = fields.String(required=True, validate=validate.OneOf(['amalgam', 'hnn']))
    gamma = fields.List(fields.Integer(), required=True, validate=validate.Length(min=1))
    left_gens = fields.List(fields.Integer(validate=validate.Range(min=1)), load_default=list)
    right_gens = fields.List(fields.Integer(validate=validate.Range(min=1)), load_default=list)
    stable_letter = fields.Integer(allow_none=True, load_default=None, validate=validate.Range(min=1))

    @validates('gamma')
    def validate_gamma(self, value, **kwargs):
        if 0 in value:
            raise ValidationError('0 is not a letter')

    @validates_schema
    def validate_kind(self, data, **kwargs):
        if data['kind'] == 'amalgam' and not data.get('right_gens'):
            raise ValidationError('An amalgam needs right_gens', 'right_gens')
        if data['kind'] == 'hnn' and data.get('stable_letter') is None:
            raise ValidationError('An HNN extension needs a stable_letter', 'stable_letter')


class RepresentationSchema(Schema):
    class Meta:
        unknown = RAISE

    gens = fields.List(fields.String(validate=validate.Length(min=1)), required=True,
                       validate=validate.Length(min=1))
    images = fields.List(fields.List(FiniteFloat()), required=True)
    relators = fields.List(fields.List(fields.Integer()), load_default=list)
    splitting = fields.Nested(SplittingSchema, allow_none=True, load_default=None)

    @validates('images')
    def validate_images(self, value, **kwargs):
        for i, entries in enumerate(value):
            try:
                _matrix_validator(entries)
            except ValidationError as exc:
                raise ValidationError(f'image {i}: {exc.messages[0]}') from exc

    @validates_schema
    def validate_counts(self, data, **kwargs):
        if len(data['gens']) != len(data['images']):
            raise ValidationError('Each generator needs exactly one image', 'images')


# ==================== RUN CONFIG ====================

class TolerancesSchema(Schema):
    class Meta:
        unknown = RAISE

    det = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))
    eigen_gap = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))
    collinear = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))
    hash_quantum = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))
    dedup = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))


class BudgetsSchema(Schema):
    class Meta:
        unknown = RAISE

    classes = fields.Integer(validate=validate.Range(min=1))
    orbit = fields.Integer(validate=validate.Range(min=1))


class QuadratureSchema(Schema):
    class Meta:
        unknown = RAISE

    n_rays = fields.Integer(validate=validate.Range(min=16))
    grid = fields.Integer(validate=validate.Range(min=1))
    polygon_sides = fields.Integer(validate=validate.Range(min=3))


class EntropySchema(Schema):
    class Meta:
        unknown = RAISE

    window_fraction = FiniteFloat(validate=validate.Range(min=0.1, max=1.0, min_inclusive=False, max_inclusive=False))
    max_word_len = fields.Integer(validate=validate.Range(min=1))
    orbit_radius = fields.Integer(validate=validate.Range(min=1))


class BulgeSchema(Schema):
    class Meta:
        unknown = RAISE

    max_abs_s = FiniteFloat(validate=validate.Range(min=0))
    side = fields.String(validate=validate.OneOf(['left', 'right']))


class DepthSchema(Schema):
    class Meta:
        unknown = RAISE

    depth = fields.Integer(validate=validate.Range(min=1))


class BoundsSchema(Schema):
    class Meta:
        unknown = RAISE

    converge_tol = FiniteFloat(validate=validate.Range(min=0, min_inclusive=False))


class RunConfigSchema(Schema):
    class Meta:
        unknown = RAISE

    seed = fields.Integer(validate=validate.Range(min=0))
    workers = fields.Integer(validate=validate.Range(min=1))
    tolerances = fields.Nested(TolerancesSchema)
    budgets = fields.Nested(BudgetsSchema)
    quadrature = fields.Nested(QuadratureSchema)
    entropy = fields.Nested(EntropySchema)
    bulge = fields.Nested(BulgeSchema)
    limitset = fields.Nested(DepthSchema)
    pingpong = fields.Nested(DepthSchema)
    bounds = fields.Nested(BoundsSchema)
    representation = fields.Nested(RepresentationSchema, allow_none=True)
