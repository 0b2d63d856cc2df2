from setuptools import setup

package_name = 'hyperkin'

setup(
    name=package_name,
    version='1.0.0',
    packages=[package_name],
    package_dir={'': 'src'},
    data_files=[
        ('share/' + package_name, ['config/desk.cfg']),
    ],
    install_requires=['setuptools', 'numpy', 'scikit-learn', 'matplotlib'],
    extras_require={
        'test': ['pytest'],
    },
    zip_safe=True,
    maintainer='hyperkin contributors',
    description='Hyperbolic pose/text representation learning on multi-part skeletons',
    license='MIT',
    entry_points={
        'console_scripts': [
            'hyperkin = hyperkin.cli:main',
        ],
    },
)
