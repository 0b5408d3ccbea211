use crate::geometry::Vec3;

/// A differential form given by its physical proxy components and the proxy
/// of its exterior derivative, both evaluable at physical points.
pub trait FormField: Sync {
    fn degree(&self) -> usize;
    fn value(&self, x: &Vec3<f64>) -> Vec<f64>;
    /// Proxy of `du`; empty for 3-forms.
    fn derivative(&self, x: &Vec3<f64>) -> Vec<f64>;
}

/// [`FormField`] from a pair of closures.
pub struct FnField<V, D> {
    s: usize,
    value: V,
    derivative: D,
}

impl<V, D> FnField<V, D>
where
    V: Fn(&Vec3<f64>) -> Vec<f64> + Sync,
    D: Fn(&Vec3<f64>) -> Vec<f64> + Sync,
{
    pub fn new(s: usize, value: V, derivative: D) -> Self {
        Self { s, value, derivative }
    }
}

impl<V, D> FormField for FnField<V, D>
where
    V: Fn(&Vec3<f64>) -> Vec<f64> + Sync,
    D: Fn(&Vec3<f64>) -> Vec<f64> + Sync,
{
    fn degree(&self) -> usize {
        self.s
    }

    fn value(&self, x: &Vec3<f64>) -> Vec<f64> {
        (self.value)(x)
    }

    fn derivative(&self, x: &Vec3<f64>) -> Vec<f64> {
        (self.derivative)(x)
    }
}

/// The derivative of a field, as a closed field of one degree higher.
pub struct Derivative<'a, F: ?Sized>(pub &'a F);

impl<F: FormField + ?Sized> FormField for Derivative<'_, F> {
    fn degree(&self) -> usize {
        self.0.degree() + 1
    }

    fn value(&self, x: &Vec3<f64>) -> Vec<f64> {
        self.0.derivative(x)
    }

    fn derivative(&self, _: &Vec3<f64>) -> Vec<f64> {
        match self.degree() {
            1 => vec![0.0; 3],
            2 => vec![0.0],
            _ => vec![],
        }
    }
}
